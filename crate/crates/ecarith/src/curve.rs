//! Curve records, the curve database, and changes of Weierstrass model.

use crate::point::{Curve, Point};
use crate::ring::{ArithError, Field, Rationals};
use rug::{Integer, Rational};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CurveError {
    #[error("singular curve (discriminant zero)")]
    Singular,
    #[error("bad database record on line {line}: {reason}")]
    BadRecord { line: usize, reason: String },
    #[error("unknown curve label {0}")]
    UnknownLabel(String),
    #[error("prime {0} is of bad reduction")]
    BadPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Arithmetic identity of an elliptic curve over Q on an integral model.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveData {
    pub label: String,
    pub a: [Integer; 5],
    pub conductor: u64,
    /// Root number of E over Q.
    pub sign: i32,
    pub modular_degree: Option<u64>,
    pub torsion_order: u32,
}

impl CurveData {
    pub fn new(label: &str, a: [i64; 5], conductor: u64, sign: i32, modular_degree: Option<u64>, torsion_order: u32) -> Self {
        CurveData {
            label: label.to_string(),
            a: a.map(Integer::from),
            conductor,
            sign,
            modular_degree,
            torsion_order,
        }
    }

    pub fn a1(&self) -> &Integer {
        &self.a[0]
    }

    pub fn b_invariants(&self) -> [Integer; 4] {
        let [a1, a2, a3, a4, a6] = &self.a;
        let b2 = Integer::from(a1 * a1) + Integer::from(a2 * 4);
        let b4 = Integer::from(a4 * 2) + Integer::from(a1 * a3);
        let b6 = Integer::from(a3 * a3) + Integer::from(a6 * 4);
        let b8 = Integer::from(a1 * a1) * a6 + Integer::from(a2 * a6) * 4 - Integer::from(a1 * a3) * a4
            + Integer::from(a3 * a3) * a2
            - Integer::from(a4 * a4);
        [b2, b4, b6, b8]
    }

    pub fn c4(&self) -> Integer {
        let [b2, b4, _, _] = self.b_invariants();
        Integer::from(b2.square_ref()) - b4 * 24
    }

    pub fn c6(&self) -> Integer {
        let [b2, b4, b6, _] = self.b_invariants();
        let b2c = Integer::from(b2.square_ref()) * &b2;
        -b2c + Integer::from(&b2 * &b4) * 36 - b6 * 216
    }

    pub fn discriminant(&self) -> Integer {
        let [b2, b4, b6, b8] = self.b_invariants();
        -Integer::from(b2.square_ref()) * &b8 - Integer::from(b4.square_ref()) * &b4 * 8 - Integer::from(b6.square_ref()) * 27
            + b2 * b4 * b6 * 9
    }

    /// Kolyvagin's epsilon, the negative of the root number.
    pub fn epsilon(&self) -> i32 {
        -self.sign
    }

    /// The curve over Q as a generic Weierstrass curve.
    pub fn over_q(&self) -> Curve<Rationals> {
        let a = self.a.clone().map(Rational::from);
        Curve::new(Rationals, a)
    }

    pub fn is_bad(&self, p: u64) -> bool {
        self.conductor.is_multiple_of(p)
    }
}

impl fmt::Display for CurveData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = &self.a;
        let md = self.modular_degree.map(|d| d.to_string()).unwrap_or_else(|| "?".into());
        write!(f, "{} {} [{},{},{},{},{}] {} {} {}", self.label, self.conductor, a1, a2, a3, a4, a6, self.sign, md, self.torsion_order)
    }
}

/// Line-oriented curve database.
#[derive(Clone, Debug, Default)]
pub struct CurveDb {
    pub curves: Vec<CurveData>,
}

const BUILTIN: &str = include_str!("../data/curves.txt");

impl CurveDb {
    pub fn builtin() -> Self {
        CurveDb::parse(BUILTIN).expect("shipped curve table parses")
    }

    pub fn parse(text: &str) -> Result<Self, CurveError> {
        let mut curves = vec![];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| CurveError::BadRecord { line: i + 1, reason: reason.to_string() };
            let open = line.find('[').ok_or_else(|| bad("missing ["))?;
            let close = line.find(']').ok_or_else(|| bad("missing ]"))?;
            let head: Vec<&str> = line[..open].split_whitespace().collect();
            if head.len() != 2 {
                return Err(bad("expected label and conductor before the invariants"));
            }
            let conductor: u64 = head[1].parse().map_err(|_| bad("conductor"))?;
            let inv: Vec<i64> = line[open + 1..close]
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad("a-invariants"))?;
            if inv.len() != 5 {
                return Err(bad("need five a-invariants"));
            }
            let tail: Vec<&str> = line[close + 1..].split_whitespace().collect();
            if tail.len() != 3 {
                return Err(bad("expected sign, modular degree and torsion order"));
            }
            let sign: i32 = tail[0].parse().map_err(|_| bad("sign"))?;
            if sign != 1 && sign != -1 {
                return Err(bad("sign must be 1 or -1"));
            }
            let modular_degree = match tail[1] {
                "?" | "-" => None,
                s => Some(s.parse().map_err(|_| bad("modular degree"))?),
            };
            let torsion_order = tail[2].parse().map_err(|_| bad("torsion order"))?;
            let c = CurveData::new(head[0], [inv[0], inv[1], inv[2], inv[3], inv[4]], conductor, sign, modular_degree, torsion_order);
            if c.discriminant() == 0 {
                return Err(bad("singular model"));
            }
            // the discriminant of an integral model is divisible by every bad prime
            let disc = c.discriminant();
            for p in small_prime_factors(conductor) {
                if !disc.is_divisible(&Integer::from(p)) {
                    return Err(bad("conductor does not divide into the discriminant"));
                }
            }
            curves.push(c);
        }
        Ok(CurveDb { curves })
    }

    pub fn get(&self, label: &str) -> Result<&CurveData, CurveError> {
        self.curves
            .iter()
            .find(|c| c.label.eq_ignore_ascii_case(label))
            .ok_or_else(|| CurveError::UnknownLabel(label.to_string()))
    }
}

/// Prime factors of n by trial division.
pub fn small_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// y^2 = x^3 + A x + B with the change of variables back to the original model:
/// x = u^2 X + r, y = u^3 Y + s u^2 X + t.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortWeierstrass {
    pub a: Rational,
    pub b: Rational,
    pub u: Rational,
    pub r: Rational,
    pub s: Rational,
    pub t: Rational,
}

impl ShortWeierstrass {
    pub fn curve(&self) -> Curve<Rationals> {
        Curve::short(Rationals, self.a.clone(), self.b.clone())
    }

    pub fn discriminant(&self) -> Rational {
        let a3 = (self.a.clone() * &self.a) * &self.a;
        let b2 = self.b.clone() * &self.b;
        (a3 * 4u32 + b2 * 27u32) * -16i32
    }

    /// Maps an original-model point to the short model, over any field containing Q.
    pub fn to_short<F: Field>(&self, f: &F, p: &Point<F::Elem>) -> Result<Point<F::Elem>, ArithError> {
        let Point::Affine(x, y) = p else { return Ok(Point::Infinity) };
        let u = f.from_rational(&self.u)?;
        let r = f.from_rational(&self.r)?;
        let s = f.from_rational(&self.s)?;
        let t = f.from_rational(&self.t)?;
        let u2 = f.mul(&u, &u);
        let u3 = f.mul(&u2, &u);
        let xs = f.div(&f.sub(x, &r), &u2)?;
        let ys = f.div(&f.sub(&f.sub(y, &f.mul(&f.mul(&s, &u2), &xs)), &t), &u3)?;
        Ok(Point::Affine(xs, ys))
    }

    /// Maps a short-model point back to the original model.
    pub fn from_short<F: Field>(&self, f: &F, p: &Point<F::Elem>) -> Result<Point<F::Elem>, ArithError> {
        let Point::Affine(xs, ys) = p else { return Ok(Point::Infinity) };
        let u = f.from_rational(&self.u)?;
        let r = f.from_rational(&self.r)?;
        let s = f.from_rational(&self.s)?;
        let t = f.from_rational(&self.t)?;
        let u2 = f.mul(&u, &u);
        let u3 = f.mul(&u2, &u);
        let x = f.add(&f.mul(&u2, xs), &r);
        let y = f.add(&f.add(&f.mul(&u3, ys), &f.mul(&f.mul(&s, &u2), xs)), &t);
        Ok(Point::Affine(x, y))
    }
}

/// Short model with A = -c4/48, B = -c6/864 and u = 1.
pub fn to_short_weierstrass(e: &CurveData) -> Result<ShortWeierstrass, CurveError> {
    if e.discriminant() == 0 {
        return Err(CurveError::Singular);
    }
    let [b2, _, _, _] = e.b_invariants();
    let a1 = Rational::from(e.a[0].clone());
    let a3 = Rational::from(e.a[2].clone());
    let b2 = Rational::from(b2);
    Ok(ShortWeierstrass {
        a: Rational::from((-e.c4(), 48)),
        b: Rational::from((-e.c6(), 864)),
        u: Rational::from(1),
        r: Rational::from(-&b2) / 12u32,
        s: Rational::from(-&a1) / 2u32,
        t: Rational::from(&a1 * &b2) / 24u32 - a3 / 2u32,
    })
}

/// Integral short model A = -27 c4, B = -54 c6 (scaling by 6 of the rational one).
pub fn to_short_weierstrass_integral(e: &CurveData) -> Result<ShortWeierstrass, CurveError> {
    let base = to_short_weierstrass(e)?;
    Ok(ShortWeierstrass {
        a: Rational::from(-e.c4() * 27),
        b: Rational::from(-e.c6() * 54),
        u: Rational::from((1, 6)),
        r: base.r,
        s: base.s,
        t: base.t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_53a1() {
        let e = CurveData::new("53A1", [1, -1, 1, 0, 0], 53, -1, Some(2), 1);
        assert_eq!(e.c4(), -15);
        assert_eq!(e.c6(), -297);
        assert_eq!(e.discriminant(), -53);
    }

    #[test]
    fn db_rejects_garbage() {
        assert!(CurveDb::parse("11A1 11 [0,-1,1,-10] 1 1 5").is_err());
        assert!(CurveDb::parse("X 11 [0,0,0,0,0] 1 1 1").is_err());
        assert!(CurveDb::parse("11A1 11 [0,-1,1,-10,-20] 1 ? 5").is_ok());
        assert!(CurveDb::parse("11A1 13 [0,-1,1,-10,-20] 1 1 5").is_err());
    }
}
