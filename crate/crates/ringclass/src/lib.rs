//! Exact arithmetic in the ring class field K[c] = K[x]/(F) and its Galois action.

pub mod quad;

use classgroup::PicGroup;
use ecarith::ring::{ArithError, Field, Ring};
use ecarith::{Curve, Point, Poly, PolyRing};
use mpkernel::{cpoly, BigComplex};
pub use quad::{QuadElem, QuadField};
use rug::{Integer, Rational};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RingError {
    #[error("arithmetic: {0}")]
    Arith(#[from] ArithError),
    #[error("defining polynomial is reducible: {0} has no inverse")]
    Reducible(String),
    #[error("Galois group is not cyclic")]
    NotCyclic,
    #[error("no Galois generator verified at {0} bits; retry with more precision")]
    NeedPrecision(u32),
    #[error("automorphism image is off the curve")]
    OffCurve,
    #[error("defining polynomial must be monic of positive degree")]
    BadModulus,
}

/// K[x]/(F) with F monic over K.
#[derive(Clone, Debug, PartialEq)]
pub struct RingClassField {
    pub base: QuadField,
    pub f: Poly<QuadElem>,
    ring: PolyRing<QuadField>,
}

pub type RcfElem = Poly<QuadElem>;

impl RingClassField {
    /// F is made monic; it must have positive degree.
    pub fn new(base: QuadField, f: Poly<QuadElem>) -> Result<Self, RingError> {
        let ring = PolyRing::new(base);
        let f = ring.monic(&ring.normalize(f))?;
        if f.len() < 2 {
            return Err(RingError::BadModulus);
        }
        Ok(RingClassField { base, f, ring })
    }

    /// Field given by a polynomial with rational coefficients.
    pub fn from_rational(big_d: u64, f: &[Rational]) -> Result<Self, RingError> {
        Self::new(QuadField::new(big_d), f.iter().map(|c| QuadElem::rational(c.clone())).collect())
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    pub fn poly_ring(&self) -> &PolyRing<QuadField> {
        &self.ring
    }

    pub fn alpha(&self) -> RcfElem {
        self.reduce(self.ring.x())
    }

    pub fn from_k(&self, a: QuadElem) -> RcfElem {
        self.ring.constant(a)
    }

    pub fn reduce(&self, a: RcfElem) -> RcfElem {
        self.ring.rem(&a, &self.f).expect("monic modulus")
    }

    /// Coefficient list of length deg F, padding with zeros.
    pub fn coeffs(&self, a: &RcfElem) -> Vec<QuadElem> {
        let mut v = a.clone();
        v.resize(self.degree(), self.base.zero());
        v
    }

    /// Complex value of `a` under the embedding alpha -> `alpha_value`.
    pub fn embed(&self, a: &RcfElem, alpha_value: &BigComplex) -> BigComplex {
        let prec = alpha_value.prec();
        let c: Vec<BigComplex> = a.iter().map(|q| self.base.embed(q, prec)).collect();
        cpoly::eval(&c, alpha_value)
    }

    /// Substitutes alpha -> g in `a`.
    pub fn compose(&self, a: &RcfElem, g: &RcfElem) -> RcfElem {
        let mut acc = self.zero();
        for c in a.iter().rev() {
            acc = self.mul(&acc, g);
            acc = self.add(&acc, &self.from_k(c.clone()));
        }
        acc
    }

    /// Exact evaluation of a polynomial over K at an element.
    pub fn eval_k_poly(&self, p: &[QuadElem], a: &RcfElem) -> RcfElem {
        self.compose(&p.to_vec(), a)
    }

    /// Norm down to K: the determinant of multiplication by `a`.
    pub fn norm_to_k(&self, a: &RcfElem) -> QuadElem {
        let n = self.degree();
        let k = &self.base;
        let mut m: Vec<Vec<QuadElem>> = Vec::with_capacity(n);
        let mut basis = self.one();
        for _ in 0..n {
            m.push(self.coeffs(&self.mul(a, &basis)));
            basis = self.mul(&basis, &self.alpha());
        }
        let mut det = k.one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !k.is_zero(&m[r][col])) else {
                return k.zero();
            };
            if piv != col {
                m.swap(piv, col);
                det = k.neg(&det);
            }
            det = k.mul(&det, &m[col][col]);
            let inv = k.inv(&m[col][col]).expect("nonzero pivot");
            for r in col + 1..n {
                if k.is_zero(&m[r][col]) {
                    continue;
                }
                let t = k.mul(&m[r][col], &inv);
                for j in col..n {
                    let s = k.mul(&t, &m[col][j]);
                    m[r][j] = k.sub(&m[r][j], &s);
                }
            }
        }
        det
    }

    /// Coefficient-wise conjugation of K, which fixes F when F is rational.
    pub fn conj_k(&self, a: &RcfElem) -> RcfElem {
        a.iter().map(|c| self.base.conj(c)).collect()
    }

    /// `c0;c1;...` with K-elements in `u+v*sqrt(-D)` form.
    pub fn format_elem(&self, a: &RcfElem) -> String {
        self.coeffs(a).iter().map(|c| self.base.format(c)).collect::<Vec<_>>().join(";")
    }

    pub fn parse_elem(&self, s: &str) -> Option<RcfElem> {
        let v: Option<Vec<QuadElem>> = s.split(';').map(|t| self.base.parse(t)).collect();
        Some(self.reduce(self.ring.normalize(v?)))
    }

    /// Human-readable polynomial in alpha.
    pub fn pretty(&self, a: &RcfElem) -> String {
        let mut terms = vec![];
        for (i, c) in a.iter().enumerate().rev() {
            if self.base.is_zero(c) {
                continue;
            }
            let coef = format!("({})", self.base.format(c));
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}*a"),
                _ => format!("{coef}*a^{i}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

impl Ring for RingClassField {
    type Elem = RcfElem;

    fn zero(&self) -> RcfElem {
        vec![]
    }
    fn one(&self) -> RcfElem {
        vec![self.base.one()]
    }
    fn from_i64(&self, n: i64) -> RcfElem {
        self.ring.from_i64s(&[n])
    }
    fn add(&self, a: &RcfElem, b: &RcfElem) -> RcfElem {
        self.ring.add(a, b)
    }
    fn sub(&self, a: &RcfElem, b: &RcfElem) -> RcfElem {
        self.ring.sub(a, b)
    }
    fn mul(&self, a: &RcfElem, b: &RcfElem) -> RcfElem {
        self.reduce(self.ring.mul(a, b))
    }
    fn neg(&self, a: &RcfElem) -> RcfElem {
        self.ring.neg(a)
    }
    fn is_zero(&self, a: &RcfElem) -> bool {
        a.is_empty()
    }
    fn div_exact_i64(&self, a: &RcfElem, n: i64) -> RcfElem {
        a.iter().map(|c| self.base.div_exact_i64(c, n)).collect()
    }
    fn mul_i64(&self, a: &RcfElem, n: i64) -> RcfElem {
        self.ring.normalize(a.iter().map(|c| self.base.mul_i64(c, n)).collect())
    }
    fn fmt_elem(&self, a: &RcfElem) -> String {
        self.pretty(a)
    }
}

impl Field for RingClassField {
    fn inv(&self, a: &RcfElem) -> Result<RcfElem, ArithError> {
        if a.is_empty() {
            return Err(ArithError::DivisionByZero);
        }
        let (g, s, _) = self.ring.xgcd(a, &self.f)?;
        if g.len() != 1 {
            return Err(ArithError::NotInvertible(self.pretty(a)));
        }
        Ok(self.reduce(s))
    }
    fn from_integer(&self, n: &Integer) -> RcfElem {
        self.ring.constant(self.base.from_integer(n))
    }
    fn from_rational(&self, q: &Rational) -> Result<RcfElem, ArithError> {
        Ok(self.ring.constant(QuadElem::rational(q.clone())))
    }
}

/// sigma(alpha) = image, so sigma(e) = e(image).
#[derive(Clone, Debug, PartialEq)]
pub struct Automorphism {
    pub image_of_alpha: RcfElem,
    pub order: usize,
}

impl Automorphism {
    pub fn identity(l: &RingClassField) -> Self {
        Automorphism { image_of_alpha: l.alpha(), order: 1 }
    }

    pub fn apply(&self, l: &RingClassField, e: &RcfElem) -> RcfElem {
        l.compose(e, &self.image_of_alpha)
    }

    /// sigma^k.
    pub fn pow(&self, l: &RingClassField, k: usize) -> Automorphism {
        let k = if self.order > 0 { k % self.order } else { k };
        let mut img = l.alpha();
        for _ in 0..k {
            img = self.apply(l, &img);
        }
        let order = if k == 0 { 1 } else { self.order / gcd(self.order, k) };
        Automorphism { image_of_alpha: img, order }
    }

    /// Is F(image) = 0 in K[c]?
    pub fn is_root_of_f(&self, l: &RingClassField) -> bool {
        l.is_zero(&l.eval_k_poly(&l.f, &self.image_of_alpha))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact multiplicative order of alpha -> g, or None beyond `limit`.
pub fn automorphism_order(l: &RingClassField, g: &RcfElem, limit: usize) -> Option<usize> {
    let alpha = l.alpha();
    let mut cur = g.clone();
    for k in 1..=limit {
        if cur == alpha {
            return Some(k);
        }
        cur = l.compose(&cur, g);
    }
    None
}

/// Recognizes the root-mapping polynomial for the class group generator.
/// `alpha_values[b]` is the embedding of alpha at the point of class b; alpha itself
/// sits at the identity class.
pub fn find_galois_generator(l: &RingClassField, alpha_values: &[BigComplex], pic: &PicGroup) -> Result<Automorphism, RingError> {
    let g = pic.generator.ok_or(RingError::NotCyclic)?;
    let h = pic.h();
    assert_eq!(alpha_values.len(), h);
    let prec = alpha_values[0].prec();
    let targets: Vec<BigComplex> = (0..h).map(|b| alpha_values[pic.mul(g, b)].clone()).collect();
    let coeffs = cpoly::interpolate(alpha_values, &targets);
    // interpolation loses some digits; keep the denominator bound well inside
    let max_den = Integer::from(1) << (prec as f64 * 0.35) as u32;
    let image: Option<Vec<QuadElem>> = coeffs.iter().map(|z| l.base.recognize(z, &max_den)).collect();
    let image = image.ok_or(RingError::NeedPrecision(prec))?;
    let image = l.reduce(l.poly_ring().normalize(image));
    let cand = Automorphism { image_of_alpha: image, order: h };
    if !cand.is_root_of_f(l) || automorphism_order(l, &cand.image_of_alpha, h) != Some(h) {
        return Err(RingError::NeedPrecision(prec));
    }
    Ok(cand)
}

/// Coordinate-wise alpha -> g(alpha).
pub fn apply_aut(curve: &Curve<RingClassField>, p: &Point<RcfElem>, s: &Automorphism) -> Result<Point<RcfElem>, RingError> {
    let l = &curve.field;
    let out = match p {
        Point::Infinity => Point::Infinity,
        Point::Affine(x, y) => Point::Affine(s.apply(l, x), s.apply(l, y)),
    };
    if !curve.on_curve(&out) {
        return Err(RingError::OffCurve);
    }
    Ok(out)
}

/// A curve with rational coefficients viewed over K[c].
pub fn curve_over(l: &RingClassField, a: &[Integer; 5]) -> Curve<RingClassField> {
    Curve::new(l.clone(), a.clone().map(|c| l.from_integer(&c)))
}

/// Sum of all conjugates of `p` under the powers of `s`.
pub fn trace_point(curve: &Curve<RingClassField>, p: &Point<RcfElem>, s: &Automorphism) -> Result<Point<RcfElem>, RingError> {
    let mut acc = Point::Infinity;
    let mut cur = p.clone();
    for _ in 0..s.order {
        acc = curve.add(&acc, &cur)?;
        cur = apply_aut(curve, &cur, s)?;
    }
    Ok(acc)
}
