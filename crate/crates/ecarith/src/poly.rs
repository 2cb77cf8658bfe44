//! Dense univariate polynomials over a context ring, lowest degree first, no trailing zeros.

use crate::ring::{ArithError, Field, Ring};

#[derive(Clone, Debug, PartialEq)]
pub struct PolyRing<R: Ring> {
    pub base: R,
}

pub type Poly<E> = Vec<E>;

impl<R: Ring> PolyRing<R> {
    pub fn new(base: R) -> Self {
        PolyRing { base }
    }

    pub fn normalize(&self, mut a: Poly<R::Elem>) -> Poly<R::Elem> {
        while a.last().map(|c| self.base.is_zero(c)).unwrap_or(false) {
            a.pop();
        }
        a
    }

    /// Degree, with the zero polynomial reported as None.
    pub fn degree(&self, a: &Poly<R::Elem>) -> Option<usize> {
        if a.is_empty() {
            None
        } else {
            Some(a.len() - 1)
        }
    }

    pub fn from_coeffs(&self, c: Vec<R::Elem>) -> Poly<R::Elem> {
        self.normalize(c)
    }

    pub fn from_i64s(&self, c: &[i64]) -> Poly<R::Elem> {
        self.normalize(c.iter().map(|&n| self.base.from_i64(n)).collect())
    }

    pub fn constant(&self, c: R::Elem) -> Poly<R::Elem> {
        self.normalize(vec![c])
    }

    /// The polynomial x.
    pub fn x(&self) -> Poly<R::Elem> {
        vec![self.base.zero(), self.base.one()]
    }

    pub fn monomial(&self, c: R::Elem, k: usize) -> Poly<R::Elem> {
        let mut v = vec![self.base.zero(); k];
        v.push(c);
        self.normalize(v)
    }

    pub fn lead<'a>(&self, a: &'a Poly<R::Elem>) -> Option<&'a R::Elem> {
        a.last()
    }

    pub fn scale(&self, a: &Poly<R::Elem>, c: &R::Elem) -> Poly<R::Elem> {
        self.normalize(a.iter().map(|x| self.base.mul(x, c)).collect())
    }

    pub fn eval(&self, a: &Poly<R::Elem>, x: &R::Elem) -> R::Elem {
        let mut acc = self.base.zero();
        for c in a.iter().rev() {
            acc = self.base.add(&self.base.mul(&acc, x), c);
        }
        acc
    }

    pub fn derivative(&self, a: &Poly<R::Elem>) -> Poly<R::Elem> {
        self.normalize(a.iter().enumerate().skip(1).map(|(i, c)| self.base.mul_i64(c, i as i64)).collect())
    }

    /// a(b(x)).
    pub fn compose(&self, a: &Poly<R::Elem>, b: &Poly<R::Elem>) -> Poly<R::Elem> {
        let mut acc: Poly<R::Elem> = vec![];
        for c in a.iter().rev() {
            acc = self.add(&self.mul(&acc, b), &self.constant(c.clone()));
        }
        acc
    }

    /// Coefficient-wise image under a ring map.
    pub fn map<S: Ring>(&self, target: &PolyRing<S>, a: &Poly<R::Elem>, f: impl Fn(&R::Elem) -> S::Elem) -> Poly<S::Elem> {
        target.normalize(a.iter().map(f).collect())
    }

    pub fn to_string_with(&self, a: &Poly<R::Elem>, var: &str) -> String {
        if a.is_empty() {
            return "0".into();
        }
        let mut parts = vec![];
        for (i, c) in a.iter().enumerate().rev() {
            if self.base.is_zero(c) {
                continue;
            }
            let cs = self.base.fmt_elem(c);
            parts.push(match i {
                0 => format!("({cs})"),
                1 => format!("({cs})*{var}"),
                _ => format!("({cs})*{var}^{i}"),
            });
        }
        parts.join(" + ")
    }
}

impl<R: Ring> Ring for PolyRing<R> {
    type Elem = Poly<R::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![]
    }
    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.constant(self.base.from_i64(n))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.len().max(b.len());
        let z = self.base.zero();
        let out = (0..n).map(|i| self.base.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
        self.normalize(out)
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.len().max(b.len());
        let z = self.base.zero();
        let out = (0..n).map(|i| self.base.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
        self.normalize(out)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![self.base.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.base.add(&out[i + j], &self.base.mul(x, y));
            }
        }
        self.normalize(out)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|c| self.base.neg(c)).collect()
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|c| self.base.is_zero(c))
    }
    fn div_exact_i64(&self, a: &Self::Elem, n: i64) -> Self::Elem {
        self.normalize(a.iter().map(|c| self.base.div_exact_i64(c, n)).collect())
    }
    fn fmt_elem(&self, a: &Self::Elem) -> String {
        self.to_string_with(a, "x")
    }
}

impl<F: Field> PolyRing<F> {
    /// Euclidean division a = q b + r with deg r < deg b.
    pub fn divrem(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Result<(Poly<F::Elem>, Poly<F::Elem>), ArithError> {
        let b = self.normalize(b.clone());
        let lb = b.last().ok_or(ArithError::DivisionByZero)?;
        let linv = self.base.inv(lb)?;
        let mut r = self.normalize(a.clone());
        if r.len() < b.len() {
            return Ok((vec![], r));
        }
        let mut q = vec![self.base.zero(); r.len() - b.len() + 1];
        while r.len() >= b.len() && !r.is_empty() {
            let shift = r.len() - b.len();
            let c = self.base.mul(r.last().unwrap(), &linv);
            for (i, bc) in b.iter().enumerate() {
                r[i + shift] = self.base.sub(&r[i + shift], &self.base.mul(&c, bc));
            }
            q[shift] = c;
            // the leading term cancels by construction
            r.pop();
            r = self.normalize(r);
        }
        Ok((self.normalize(q), r))
    }

    pub fn rem(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Result<Poly<F::Elem>, ArithError> {
        Ok(self.divrem(a, b)?.1)
    }

    pub fn monic(&self, a: &Poly<F::Elem>) -> Result<Poly<F::Elem>, ArithError> {
        match a.last() {
            None => Ok(vec![]),
            Some(l) => Ok(self.scale(a, &self.base.inv(l)?)),
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Result<Poly<F::Elem>, ArithError> {
        let mut a = self.normalize(a.clone());
        let mut b = self.normalize(b.clone());
        while !b.is_empty() {
            let r = self.rem(&a, &b)?;
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// (g, s, t) with s a + t b = g monic.
    pub fn xgcd(
        &self,
        a: &Poly<F::Elem>,
        b: &Poly<F::Elem>,
    ) -> Result<(Poly<F::Elem>, Poly<F::Elem>, Poly<F::Elem>), ArithError> {
        let (mut r0, mut r1) = (self.normalize(a.clone()), self.normalize(b.clone()));
        let (mut s0, mut s1) = (self.one(), self.zero());
        let (mut t0, mut t1) = (self.zero(), self.one());
        while !r1.is_empty() {
            let (q, r) = self.divrem(&r0, &r1)?;
            let s2 = self.sub(&s0, &self.mul(&q, &s1));
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.last() {
            None => Ok((r0, s0, t0)),
            Some(l) => {
                let li = self.base.inv(l)?;
                Ok((self.scale(&r0, &li), self.scale(&s0, &li), self.scale(&t0, &li)))
            }
        }
    }

    pub fn mulmod(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>, m: &Poly<F::Elem>) -> Result<Poly<F::Elem>, ArithError> {
        self.rem(&self.mul(a, b), m)
    }

    /// a^e mod m, exponent as a big integer.
    pub fn powmod(&self, a: &Poly<F::Elem>, e: &rug::Integer, m: &Poly<F::Elem>) -> Result<Poly<F::Elem>, ArithError> {
        let mut acc = self.rem(&self.one(), m)?;
        let base = self.rem(a, m)?;
        let bits = e.significant_bits();
        for i in (0..bits).rev() {
            acc = self.mulmod(&acc, &acc, m)?;
            if e.get_bit(i) {
                acc = self.mulmod(&acc, &base, m)?;
            }
        }
        Ok(acc)
    }
}
