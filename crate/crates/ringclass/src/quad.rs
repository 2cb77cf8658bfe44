//! The imaginary quadratic field Q(sqrt(-D)).

use ecarith::ring::{ArithError, Field, Ring};
use mpkernel::{rational_reconstruct, BigComplex};
use rug::{Float, Integer, Rational};
use std::fmt;

/// u + v sqrt(-D).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QuadElem {
    pub u: Rational,
    pub v: Rational,
}

impl QuadElem {
    pub fn new(u: Rational, v: Rational) -> Self {
        QuadElem { u, v }
    }

    pub fn rational(u: Rational) -> Self {
        QuadElem { u, v: Rational::new() }
    }

    pub fn is_rational(&self) -> bool {
        self.v == 0
    }

    /// Least common denominator of u and v.
    pub fn denominator(&self) -> Integer {
        self.u.denom().clone().lcm(self.v.denom())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadField {
    pub big_d: u64,
}

impl QuadField {
    pub fn new(big_d: u64) -> Self {
        QuadField { big_d }
    }

    pub fn sqrt_minus_d(&self) -> QuadElem {
        QuadElem::new(Rational::new(), Rational::from(1))
    }

    pub fn conj(&self, a: &QuadElem) -> QuadElem {
        QuadElem::new(a.u.clone(), Rational::from(-&a.v))
    }

    pub fn norm(&self, a: &QuadElem) -> Rational {
        Rational::from(a.u.square_ref()) + Rational::from(a.v.square_ref()) * self.big_d
    }

    pub fn trace(&self, a: &QuadElem) -> Rational {
        Rational::from(&a.u * 2u32)
    }

    /// The embedding sending sqrt(-D) to i sqrt(D).
    pub fn embed(&self, a: &QuadElem, prec: u32) -> BigComplex {
        let sd = Float::with_val(prec, self.big_d).sqrt();
        BigComplex::new(Float::with_val(prec, &a.u), Float::with_val(prec, &a.v) * sd)
    }

    /// Recognizes z as u + v sqrt(-D) with denominators at most `max_den`.
    pub fn recognize(&self, z: &BigComplex, max_den: &Integer) -> Option<QuadElem> {
        let sd = Float::with_val(z.prec(), self.big_d).sqrt();
        let u = rational_reconstruct(&z.re, max_den)?.value;
        let v = rational_reconstruct(&Float::with_val(z.prec(), &z.im / &sd), max_den)?.value;
        Some(QuadElem::new(u, v))
    }

    pub fn format(&self, a: &QuadElem) -> String {
        match (a.u == 0, a.v == 0) {
            (_, true) => a.u.to_string(),
            (true, false) => format!("{}*sqrt(-{})", a.v, self.big_d),
            _ => format!("{}+{}*sqrt(-{})", a.u, a.v, self.big_d).replace("+-", "-"),
        }
    }

    /// Parses the output of `format`.
    pub fn parse(&self, s: &str) -> Option<QuadElem> {
        let s = s.trim();
        let tag = format!("*sqrt(-{})", self.big_d);
        let Some(body) = s.strip_suffix(&tag) else {
            return Some(QuadElem::rational(s.parse().ok()?));
        };
        // split at the last sign that is not leading and not inside an exponent
        let bytes = body.as_bytes();
        let cut = (1..bytes.len()).rev().find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/');
        match cut {
            None => Some(QuadElem::new(Rational::new(), body.parse().ok()?)),
            Some(i) => {
                let u: Rational = body[..i].parse().ok()?;
                let v: Rational = body[i..].trim_start_matches('+').parse().ok()?;
                Some(QuadElem::new(u, v))
            }
        }
    }
}

impl Ring for QuadField {
    type Elem = QuadElem;

    fn zero(&self) -> QuadElem {
        QuadElem::default()
    }
    fn one(&self) -> QuadElem {
        QuadElem::rational(Rational::from(1))
    }
    fn from_i64(&self, n: i64) -> QuadElem {
        QuadElem::rational(Rational::from(n))
    }
    fn add(&self, a: &QuadElem, b: &QuadElem) -> QuadElem {
        QuadElem::new(Rational::from(&a.u + &b.u), Rational::from(&a.v + &b.v))
    }
    fn sub(&self, a: &QuadElem, b: &QuadElem) -> QuadElem {
        QuadElem::new(Rational::from(&a.u - &b.u), Rational::from(&a.v - &b.v))
    }
    fn mul(&self, a: &QuadElem, b: &QuadElem) -> QuadElem {
        if a.v == 0 && b.v == 0 {
            return QuadElem::rational(Rational::from(&a.u * &b.u));
        }
        let u = Rational::from(&a.u * &b.u) - Rational::from(&a.v * &b.v) * self.big_d;
        let v = Rational::from(&a.u * &b.v) + Rational::from(&a.v * &b.u);
        QuadElem::new(u, v)
    }
    fn neg(&self, a: &QuadElem) -> QuadElem {
        QuadElem::new(Rational::from(-&a.u), Rational::from(-&a.v))
    }
    fn is_zero(&self, a: &QuadElem) -> bool {
        a.u == 0 && a.v == 0
    }
    fn div_exact_i64(&self, a: &QuadElem, n: i64) -> QuadElem {
        QuadElem::new(Rational::from(&a.u / n), Rational::from(&a.v / n))
    }
    fn mul_i64(&self, a: &QuadElem, n: i64) -> QuadElem {
        QuadElem::new(Rational::from(&a.u * n), Rational::from(&a.v * n))
    }
    fn fmt_elem(&self, a: &QuadElem) -> String {
        self.format(a)
    }
}

impl Field for QuadField {
    fn inv(&self, a: &QuadElem) -> Result<QuadElem, ArithError> {
        let n = self.norm(a);
        if n == 0 {
            return Err(ArithError::DivisionByZero);
        }
        let c = self.conj(a);
        Ok(QuadElem::new(c.u / &n, c.v / n))
    }
    fn from_integer(&self, n: &Integer) -> QuadElem {
        QuadElem::rational(Rational::from(n.clone()))
    }
    fn from_rational(&self, q: &Rational) -> Result<QuadElem, ArithError> {
        Ok(QuadElem::rational(q.clone()))
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*s", self.u, self.v)
    }
}
