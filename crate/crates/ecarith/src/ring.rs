//! Coefficient rings and fields, passed around as explicit context objects.

use rug::{Integer, Rational};
use std::fmt::Debug;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("element {0} is not invertible")]
    NotInvertible(String),
}

/// Commutative ring with unit. Elements carry no context; the ring object does.
pub trait Ring: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Exact division by a small nonzero integer known to divide `a`.
    fn div_exact_i64(&self, a: &Self::Elem, n: i64) -> Self::Elem;
    fn fmt_elem(&self, a: &Self::Elem) -> String {
        format!("{:?}", a)
    }

    fn eq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.is_zero(&self.sub(a, b))
    }

    fn mul_i64(&self, a: &Self::Elem, n: i64) -> Self::Elem {
        self.mul(a, &self.from_i64(n))
    }

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        acc
    }
}

pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, ArithError>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, ArithError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Image of an integer, by Horner in base 2^32.
    fn from_integer(&self, n: &Integer) -> Self::Elem {
        let base = self.from_i64(1 << 32);
        let mut acc = self.zero();
        for d in n.as_abs().to_digits::<u32>(rug::integer::Order::Msf) {
            acc = self.add(&self.mul(&acc, &base), &self.from_i64(d as i64));
        }
        if *n < 0 {
            self.neg(&acc)
        } else {
            acc
        }
    }

    /// Image of a rational; fails when the denominator is not a unit.
    fn from_rational(&self, q: &Rational) -> Result<Self::Elem, ArithError> {
        let num = self.from_integer(q.numer());
        let den = self.from_integer(q.denom());
        self.div(&num, &den).map_err(|_| ArithError::NotInvertible(q.to_string()))
    }
}

/// The rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = Rational;
    fn zero(&self) -> Rational {
        Rational::new()
    }
    fn one(&self) -> Rational {
        Rational::from(1)
    }
    fn from_i64(&self, n: i64) -> Rational {
        Rational::from(n)
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        Rational::from(a + b)
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        Rational::from(a - b)
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        Rational::from(a * b)
    }
    fn neg(&self, a: &Rational) -> Rational {
        Rational::from(-a)
    }
    fn is_zero(&self, a: &Rational) -> bool {
        *a == 0
    }
    fn div_exact_i64(&self, a: &Rational, n: i64) -> Rational {
        Rational::from(a / n)
    }
    fn fmt_elem(&self, a: &Rational) -> String {
        a.to_string()
    }
}

impl Field for Rationals {
    fn from_integer(&self, n: &Integer) -> Rational {
        Rational::from(n.clone())
    }
    fn from_rational(&self, q: &Rational) -> Result<Rational, ArithError> {
        Ok(q.clone())
    }
    fn inv(&self, a: &Rational) -> Result<Rational, ArithError> {
        if *a == 0 {
            Err(ArithError::DivisionByZero)
        } else {
            Ok(a.clone().recip())
        }
    }
}

/// The integers, used for symbolic and integral computations.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Integers;

impl Ring for Integers {
    type Elem = Integer;
    fn zero(&self) -> Integer {
        Integer::new()
    }
    fn one(&self) -> Integer {
        Integer::from(1)
    }
    fn from_i64(&self, n: i64) -> Integer {
        Integer::from(n)
    }
    fn add(&self, a: &Integer, b: &Integer) -> Integer {
        Integer::from(a + b)
    }
    fn sub(&self, a: &Integer, b: &Integer) -> Integer {
        Integer::from(a - b)
    }
    fn mul(&self, a: &Integer, b: &Integer) -> Integer {
        Integer::from(a * b)
    }
    fn neg(&self, a: &Integer) -> Integer {
        Integer::from(-a)
    }
    fn is_zero(&self, a: &Integer) -> bool {
        *a == 0
    }
    fn div_exact_i64(&self, a: &Integer, n: i64) -> Integer {
        Integer::from(a / n)
    }
    fn fmt_elem(&self, a: &Integer) -> String {
        a.to_string()
    }
}

/// Prime field F_p with p < 2^63.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        PrimeField { p }
    }

    pub fn reduce_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    pub fn reduce_integer(&self, n: &Integer) -> u64 {
        n.clone().div_rem_euc(Integer::from(self.p)).1.to_u64().unwrap_or(0)
    }

    /// Reduction of a rational whose denominator is prime to p.
    pub fn reduce_rational(&self, q: &Rational) -> Result<u64, ArithError> {
        let m = Integer::from(self.p);
        let num = q.numer().clone().div_rem_euc(m.clone()).1.to_u64().unwrap();
        let den = q.denom().clone().div_rem_euc(m.clone()).1.to_u64().unwrap();
        if den == 0 {
            return Err(ArithError::NotInvertible(q.to_string()));
        }
        Ok(self.mul(&num, &self.inv(&den)?))
    }

    pub fn pow_u(&self, a: u64, e: u64) -> u64 {
        self.pow(&a, e)
    }

    /// Legendre symbol of a.
    pub fn legendre(&self, a: u64) -> i32 {
        let a = a % self.p;
        if a == 0 {
            return 0;
        }
        if self.p == 2 {
            return 1;
        }
        if self.pow(&a, (self.p - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    /// A square root of a (Tonelli-Shanks), if one exists.
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        let p = self.p;
        let a = a % p;
        if a == 0 || p == 2 {
            return Some(a);
        }
        if self.legendre(a) != 1 {
            return None;
        }
        let mut q = p - 1;
        let mut s = 0;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let mut z = 2;
        while self.legendre(z) != -1 {
            z += 1;
        }
        let mut m = s;
        let mut c = self.pow(&z, q);
        let mut t = self.pow(&a, q);
        let mut r = self.pow(&a, q.div_ceil(2));
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = self.mul(&tt, &tt);
                i += 1;
            }
            let b = self.pow(&c, 1u64 << (m - i - 1));
            m = i;
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        Some(r)
    }
}

impl Ring for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i64(n)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.p as u128 - *b as u128) % self.p as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn div_exact_i64(&self, a: &u64, n: i64) -> u64 {
        let inv = self.inv(&self.from_i64(n)).expect("small divisor must be a unit");
        self.mul(a, &inv)
    }
    fn fmt_elem(&self, a: &u64) -> String {
        a.to_string()
    }
}

impl Field for PrimeField {
    fn from_integer(&self, n: &Integer) -> u64 {
        self.reduce_integer(n)
    }
    fn from_rational(&self, q: &Rational) -> Result<u64, ArithError> {
        self.reduce_rational(q)
    }
    fn inv(&self, a: &u64) -> Result<u64, ArithError> {
        if (*a).is_multiple_of(self.p) {
            return Err(ArithError::DivisionByZero);
        }
        // extended Euclid on i128 to avoid the cost of exponentiation
        let (mut r0, mut r1) = (self.p as i128, *a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if r0 != 1 {
            return Err(ArithError::NotInvertible(a.to_string()));
        }
        Ok(t0.rem_euclid(self.p as i128) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_mod_p() {
        for p in [3u64, 5, 7, 13, 17, 101, 65537, 1_000_003] {
            let f = PrimeField::new(p);
            for a in 1..40u64 {
                if let Some(r) = f.sqrt(a) {
                    assert_eq!(f.mul(&r, &r), a % p);
                } else {
                    assert_eq!(f.legendre(a), -1);
                }
            }
        }
    }

    #[test]
    fn inverse_mod_p() {
        let f = PrimeField::new(101);
        for a in 1..101u64 {
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        }
        assert!(f.inv(&0).is_err());
    }

    #[test]
    fn reduce_fraction() {
        let f = PrimeField::new(7);
        let x = f.reduce_rational(&Rational::from((3, 4))).unwrap();
        assert_eq!(f.mul(&x, &4), 3);
        assert!(f.reduce_rational(&Rational::from((1, 14))).is_err());
    }
}
