//! Binary quadratic forms of negative discriminant, reduction and composition.

use std::fmt;

/// a x^2 + b xy + c y^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// (g, x, y) with x a + y b = g >= 0
fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

impl ClassForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        ClassForm { a, b, c }
    }

    /// The form with given a and b on discriminant d, if c comes out integral.
    pub fn from_ab(a: i64, b: i64, d: i64) -> Option<Self> {
        let num = b as i128 * b as i128 - d as i128;
        if a == 0 || num % (4 * a as i128) != 0 {
            return None;
        }
        Some(ClassForm { a, b, c: (num / (4 * a as i128)) as i64 })
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a as i128, self.b as i128), self.c as i128) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The unique reduced form equivalent to a positive definite form.
    pub fn reduce(&self) -> Self {
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        loop {
            if b > a || b <= -a {
                // b -> b + 2ak lands in (-a, a]
                let k = (a - b).div_euclid(2 * a);
                let nb = b + 2 * a * k;
                c = (nb * nb - (b * b - 4 * a * c)) / (4 * a);
                b = nb;
                continue;
            }
            if a > c {
                (a, b, c) = (c, -b, a);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
                continue;
            }
            return ClassForm { a: a as i64, b: b as i64, c: c as i64 };
        }
    }

    pub fn inverse(&self) -> Self {
        ClassForm { a: self.a, b: -self.b, c: self.c }.reduce()
    }

    /// Dirichlet composition followed by reduction.
    pub fn compose(&self, other: &ClassForm) -> Self {
        let d = self.discriminant() as i128;
        let (a1, b1) = (self.a as i128, self.b as i128);
        let (a2, b2) = (other.a as i128, other.b as i128);
        let s = (b1 + b2) / 2;
        let (e1, x1, y1) = xgcd(a1, a2);
        let (e, x2, z) = xgcd(e1, s);
        let (x, y) = (x2 * x1, x2 * y1);
        // x a1 + y a2 + z s = e
        let a3 = a1 * a2 / (e * e);
        let bnum = x * a1 * b2 + y * a2 * b1 + z * (b1 * b2 + d) / 2;
        let b3 = (bnum / e).rem_euclid(2 * a3);
        let c3 = (b3 * b3 - d) / (4 * a3);
        ClassForm { a: a3 as i64, b: b3 as i64, c: c3 as i64 }.reduce()
    }

    pub fn principal(d: i64) -> Self {
        let b = d.rem_euclid(2);
        ClassForm::from_ab(1, b, d).expect("valid discriminant")
    }
}

impl fmt::Display for ClassForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

/// All reduced primitive forms of discriminant d < 0, sorted by (a, b).
pub fn enumerate_reduced(d: i64) -> Vec<ClassForm> {
    let mut out = vec![];
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let Some(f) = ClassForm::from_ab(a, b, d) else { continue };
            if f.c < a || (f.c == a && b < 0) || !f.is_primitive() {
                continue;
            }
            out.push(f);
        }
        a += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_is_idempotent() {
        for f in enumerate_reduced(-1075) {
            assert!(f.is_reduced());
            assert_eq!(f.reduce(), f);
        }
        let f = ClassForm::new(53, 33, 10).reduce();
        assert!(f.is_reduced());
        assert_eq!(f.discriminant(), 33 * 33 - 4 * 53 * 10);
    }

    #[test]
    fn composition_with_identity() {
        let d = -175;
        let e = ClassForm::principal(d);
        for f in enumerate_reduced(d) {
            assert_eq!(f.compose(&e), f);
            assert_eq!(f.compose(&f.inverse()), e);
        }
    }
}
