//! Derivative operators D_c and the derived points P_c.

use crate::KolyError;
use classgroup::reduced_forms;
use ecarith::numth::factor;
use ecarith::ring::Field;
use ecarith::{to_short_weierstrass, Curve, CurveData, Point, ShortWeierstrass};
use modparam::HeegnerRecord;
use ringclass::{apply_aut, automorphism_order, trace_point, Automorphism, RcfElem, RingClassField};

/// D_c = prod over l | c of sum_{i=1..l} i sigma_l^i.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeOperator {
    pub factors: Vec<(u64, Automorphism)>,
}

impl DerivativeOperator {
    /// Checks that each sigma_l has exact order l + 1.
    pub fn new(l: &RingClassField, factors: Vec<(u64, Automorphism)>) -> Result<Self, KolyError> {
        for (ell, s) in &factors {
            let expected = *ell as usize + 1;
            let found = automorphism_order(l, &s.image_of_alpha, expected);
            if found != Some(expected) {
                return Err(KolyError::BadGeneratorOrder { ell: *ell, found });
            }
        }
        Ok(DerivativeOperator { factors })
    }

    /// The operator for a prime c built from the record's generator, raised to `power`.
    pub fn from_record(rec: &HeegnerRecord, power: usize) -> Result<Self, KolyError> {
        if rec.c == 1 {
            return Ok(DerivativeOperator { factors: vec![] });
        }
        let primes = factor(rec.c);
        if primes.len() != 1 || primes[0].1 != 1 {
            return Err(KolyError::Unsupported(format!("c = {} is not prime", rec.c)));
        }
        let g = rec.galois_generator.as_ref().ok_or_else(|| KolyError::Unsupported("record has no Galois generator".into()))?;
        let s = g.pow(&rec.field, power);
        Self::new(&rec.field, vec![(rec.c, s)])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivedPoint {
    pub label: String,
    pub big_d: u64,
    pub c: u64,
    pub field: RingClassField,
    /// P_c on the database model.
    pub point: Point<RcfElem>,
    /// P_c on y^2 = x^3 + Ax + B with A = -c4/48, B = -c6/864.
    pub short: Point<RcfElem>,
    pub model: ShortWeierstrass,
    /// Which record and operator produced the point.
    pub provenance: String,
}

impl DerivedPoint {
    /// Wraps an arbitrary point of E(K[c]), for planted tests and replays.
    pub fn from_point(e: &CurveData, big_d: u64, c: u64, field: &RingClassField, point: Point<RcfElem>, provenance: &str) -> Result<Self, KolyError> {
        let model = to_short_weierstrass(e).map_err(|err| KolyError::Unsupported(err.to_string()))?;
        let short = model.to_short(field, &point)?;
        Ok(DerivedPoint {
            label: e.label.clone(),
            big_d,
            c,
            field: field.clone(),
            point,
            short,
            model,
            provenance: provenance.to_string(),
        })
    }

    pub fn short_curve(&self) -> Curve<RingClassField> {
        let l = &self.field;
        Curve::short(l.clone(), l.from_rational(&self.model.a).unwrap(), l.from_rational(&self.model.b).unwrap())
    }
}

/// sum_{i=1..l} i sigma^i(p).
fn apply_d_ell(curve: &Curve<RingClassField>, p: &Point<RcfElem>, ell: u64, s: &Automorphism) -> Result<Point<RcfElem>, KolyError> {
    let mut acc = Point::Infinity;
    let mut cur = p.clone();
    for i in 1..=ell as i64 {
        cur = apply_aut(curve, &cur, s)?;
        acc = curve.add(&acc, &curve.mul_i64(i, &cur)?)?;
    }
    Ok(acc)
}

fn class_number_k(big_d: u64) -> Result<usize, KolyError> {
    Ok(reduced_forms(-(big_d as i64))?.h())
}

/// P_c = sum_{s in S} s D_c y_c. Only h_K = 1 is supported, where S = {1}; for
/// c = 1 this is y_K itself.
pub fn derived_point(e: &CurveData, rec: &HeegnerRecord, op: &DerivativeOperator) -> Result<DerivedPoint, KolyError> {
    if class_number_k(rec.big_d)? != 1 {
        return Err(KolyError::Unsupported("coset representatives for h_K > 1".into()));
    }
    let curve = rec.curve(e);
    let mut p = rec.point.clone();
    let mut names = vec![];
    for (ell, s) in &op.factors {
        if s.order != *ell as usize + 1 {
            return Err(KolyError::BadGeneratorOrder { ell: *ell, found: Some(s.order) });
        }
        p = apply_d_ell(&curve, &p, *ell, s)?;
        names.push(format!("sigma_{ell}: alpha -> {}", rec.field.format_elem(&s.image_of_alpha)));
    }
    // with h_K = 1, K[1] = K and the trace of y_1 is y_1
    if op.factors.is_empty() && rec.c != 1 {
        return Err(KolyError::Unsupported("empty operator for c > 1".into()));
    }
    if !curve.on_curve(&p) {
        return Err(KolyError::Inconsistent("derived point is off the curve".into()));
    }
    let provenance = format!("y_{} of {} D={} beta={}; {}; S={{1}}", rec.c, rec.label, rec.big_d, rec.beta, names.join(", "));
    DerivedPoint::from_point(e, rec.big_d, rec.c, &rec.field, p, &provenance)
}

/// (sigma - 1) D_l y = (1 + l) y - Tr y, as points.
pub fn operator_identity_check(e: &CurveData, rec: &HeegnerRecord, s: &Automorphism) -> bool {
    let ell = rec.c;
    let curve = rec.curve(e);
    let run = || -> Result<bool, KolyError> {
        let dy = apply_d_ell(&curve, &rec.point, ell, s)?;
        let lhs = curve.sub(&apply_aut(&curve, &dy, s)?, &dy)?;
        let tr = trace_point(&curve, &rec.point, s)?;
        let rhs = curve.sub(&curve.mul_i64(ell as i64 + 1, &rec.point)?, &tr)?;
        Ok(lhs == rhs)
    };
    run().unwrap_or(false)
}

/// The same identity in Z[G_l] with G_l cyclic of order l + 1, coefficients
/// indexed by the exponent of sigma.
pub fn formal_identity_holds(ell: u64) -> bool {
    let n = ell as usize + 1;
    let d: Vec<i64> = (0..n as i64).collect();
    let mut lhs = vec![0i64; n];
    for (i, &c) in d.iter().enumerate() {
        lhs[(i + 1) % n] += c;
        lhs[i] -= c;
    }
    let mut rhs = vec![-1i64; n];
    rhs[0] += ell as i64 + 1;
    lhs == rhs
}
