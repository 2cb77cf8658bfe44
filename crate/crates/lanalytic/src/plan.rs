//! Zhang-formula heights of y_c, height-difference bounds and the precision
//! planner for the Heegner point computation.

use crate::rankin::{all_character_lseries, central_derivative, fe_tolerance, required_terms, symmetry_residual};
use crate::LError;
use classgroup::{reduced_forms, QuadOrder};
use ecarith::numth::{factor, kronecker};
use ecarith::{an_coeffs, CurveData};
use modparam::curve_lattice;
use rayon::prelude::*;
use rug::{Float, Integer};
use std::f64::consts::{LN_10, PI};

/// One character's share of h^(y_c).
#[derive(Clone, Debug, PartialEq)]
pub struct ZhangTerm {
    /// L'(f, chi', 1) for the primitive character chi' below chi.
    pub lprime: f64,
    /// |d_{c'}| for the conductor c' of chi.
    pub disc: f64,
    /// h(O_{c'}).
    pub h: usize,
    /// e_chi y_c = transfer e_chi' y_{c'}: (h_{c'} / h_c) prod_{l | c/c'} a_l.
    pub transfer: f64,
    /// |O_{c'}^*| / 2.
    pub units: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZhangComponent {
    pub exps: Vec<u64>,
    pub modulus: u64,
    pub c_prime: u64,
    pub term: ZhangTerm,
    pub hhat: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeightBound {
    pub hhat_bound: f64,
    /// Bound for the absolute logarithmic height of x(y_c).
    pub hlog_bound: f64,
    pub components: Vec<ZhangComponent>,
}

/// h^(e_chi y_c) = transfer^2 u^2 sqrt|d_{c'}| deg(phi) L' / (16 pi^2 h_{c'}^2 (f, f)).
///
/// With (f, f) = vol deg / (4 pi^2) this is sqrt|d| L' / (4 h^2 vol) per unit
/// transfer, which at c = 1 is the Gross-Zagier formula.
pub fn zhang_height(terms: &[ZhangTerm], petersson: f64, modular_degree: f64, tolerance: f64) -> Result<(f64, Vec<f64>), LError> {
    let mut comps = vec![];
    for (i, t) in terms.iter().enumerate() {
        let v = t.transfer * t.transfer * t.units * t.units * t.disc.sqrt() * modular_degree * t.lprime
            / (16.0 * PI * PI * (t.h * t.h) as f64 * petersson);
        if v < -tolerance {
            return Err(LError::NegativeHeight { index: i, value: v });
        }
        comps.push(v);
    }
    Ok((comps.iter().sum(), comps))
}

/// [lower, upper] for h^(P) - h(x(P)) (Silverman 1990, doubled to this crate's
/// normalization), with log 2 added on both sides as slack for models with b2 != 0.
pub fn silverman_bounds(e: &CurveData) -> (f64, f64) {
    let c4 = e.c4();
    let delta = e.discriminant();
    let j_num = Integer::from(&c4 * &c4) * &c4;
    let g = j_num.clone().gcd(&delta);
    let hj = Float::with_val(128, Integer::from(&j_num / &g).abs().max(Integer::from(&delta / &g).abs())).ln().to_f64();
    let hd = Float::with_val(128, delta.abs()).ln().to_f64();
    let slack = 0.5 * 2f64.ln();
    (-2.0 * (hj / 8.0 + hd / 12.0 + 0.973 + slack), 2.0 * (hj / 12.0 + hd / 12.0 + 1.07 + slack))
}

/// Per-place archimedean data for the Cremona-Prickett-Siksek bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaceData {
    pub n_v: f64,
    pub eps: f64,
    pub delta: f64,
}

/// [ (1/3d) sum n_v log delta_v, (1/3d) sum n_v log eps_v ] for h(P) - h^(P).
pub fn height_difference_bounds(places: &[PlaceData], degree: usize) -> Result<(f64, f64), LError> {
    if places.is_empty() {
        return Err(LError::MissingPlaceData("no archimedean places supplied".into()));
    }
    if let Some(p) = places.iter().find(|p| !(p.eps > 0.0 && p.delta > 0.0 && p.n_v > 0.0)) {
        return Err(LError::MissingPlaceData(format!("invalid place data {p:?}")));
    }
    let pre = 1.0 / (3.0 * degree as f64);
    Ok((pre * places.iter().map(|p| p.n_v * p.delta.ln()).sum::<f64>(), pre * places.iter().map(|p| p.n_v * p.eps.ln()).sum::<f64>()))
}

/// constant h_D D^eps c^{2 + eps}.
pub fn convexity_height_bound(h_d: usize, big_d: u64, c: u64, constant: f64, eps: f64) -> f64 {
    constant * h_d as f64 * (big_d as f64).powf(eps) * (c as f64).powf(2.0 + eps)
}

pub const CONVEXITY_CONSTANT: f64 = 100.0;
pub const GUARD_DIGITS: u32 = 30;
/// Tail margin in the term count; 1e16 > 2^32 * 1e6 also covers the guard bits
/// the parametrization carries on top of the requested digits.
pub const TERM_MARGIN: f64 = 1e16;

/// (digits, n_max) for recognizing y_c whose x has log height at most `hlog`.
pub fn precision_planner(hlog: f64, h_c: usize, im_tau_min: f64) -> (u32, usize) {
    let digits = (h_c as f64 * hlog.max(0.0) / LN_10).ceil() as u32 + GUARD_DIGITS;
    let n = ((digits as f64 * LN_10 + TERM_MARGIN.ln()) / (2.0 * PI * im_tau_min)).ceil() as usize;
    (digits, n)
}

/// e_chi y_c in terms of y_{c'}: only c/c' a product of distinct inert primes.
fn transfer(e: &CurveData, a: &[i64], big_d: u64, c: u64, c_prime: u64, h_c: usize, h_cp: usize) -> Result<f64, LError> {
    if c == c_prime {
        return Ok(1.0);
    }
    let m = c / c_prime;
    let mut prod = h_cp as f64 / h_c as f64;
    for (l, k) in factor(m) {
        if k > 1 || c_prime.is_multiple_of(l) || kronecker(-(big_d as i64), l) != -1 || e.is_bad(l) {
            return Err(LError::Unsupported(format!("trace from conductor {c} to {c_prime} through l = {l}")));
        }
        prod *= a[l as usize] as f64;
    }
    Ok(prod)
}

/// h^(y_c) = sum_chi h^(e_chi y_c) from central derivatives.
pub fn zhang_height_bound(e: &CurveData, big_d: u64, c: u64) -> Result<HeightBound, LError> {
    let order = QuadOrder::new(big_d, c).map_err(|e| LError::Domain(e.to_string()))?;
    let pic = reduced_forms(order.disc()).map_err(|e| LError::Domain(e.to_string()))?;
    let n = e.conductor as f64;
    let worst = required_terms(n * n * (order.disc() as f64).powi(2), 1.0);
    let a = an_coeffs(e, worst + 1);
    let series = all_character_lseries(&a, e.conductor, big_d, c)?;
    // chi and its conjugate share an L-function
    let lps: Vec<Option<f64>> = series
        .par_iter()
        .map(|s| {
            let canon = s.chi.normalized() <= s.chi.conj().normalized();
            if canon {
                let r = symmetry_residual(&s.series)?;
                if r > fe_tolerance() {
                    return Err(LError::FunctionalEquation { residual: r, tolerance: fe_tolerance() });
                }
                central_derivative(&s.series).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_, _>>()?;
    let lat = curve_lattice(e, 128).map_err(|x| LError::Param(x.to_string()))?;
    let vol = lat.real_volume.to_f64();
    let deg = 1.0;
    let pet = crate::height::petersson_from_degree(vol, deg);
    let mut terms = vec![];
    for (i, s) in series.iter().enumerate() {
        let lp = match lps[i] {
            Some(v) => v,
            None => {
                let target = s.chi.conj().normalized();
                let j = series.iter().position(|t| t.chi.normalized() == target).expect("conjugate present");
                lps[j].expect("canonical member computed")
            }
        };
        terms.push(ZhangTerm {
            lprime: lp,
            disc: (s.c_prime * s.c_prime * big_d) as f64,
            h: s.h_prime,
            transfer: transfer(e, &a, big_d, c, s.c_prime, pic.h(), s.h_prime)?,
            units: 1.0,
        });
    }
    let tol = 1e-6 * terms.iter().map(|t| t.lprime.abs()).fold(1.0, f64::max);
    let (total, comps) = zhang_height(&terms, pet, deg, tol)?;
    let components = series
        .iter()
        .zip(terms)
        .zip(comps)
        .map(|((s, term), hhat)| ZhangComponent { exps: s.chi.exps.clone(), modulus: s.chi.modulus, c_prime: s.c_prime, term, hhat: hhat.max(0.0) })
        .collect();
    let (lower, _) = silverman_bounds(e);
    let hhat = total.max(0.0);
    Ok(HeightBound { hhat_bound: hhat, hlog_bound: hhat - lower, components })
}
