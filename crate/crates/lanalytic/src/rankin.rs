//! Dirichlet coefficients of L(f x theta_chi, s) from local Satake data, and the
//! evaluation of Lambda, Theta and the central derivative.

use crate::mellin::{MellinTable, PhiTable, X_CUT};
use crate::theta::{characters, primitive_character, theta_coeffs, Character, ThetaSeries};
use crate::LError;
use classgroup::{reduced_forms, QuadOrder};
use ecarith::numth::{kronecker, smallest_prime_factors};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Analytically normalized coefficients (center 1/2) with
/// Lambda(s) = Q^{s/2} Gamma_C(s + 1/2)^2 L(s) = sign Lambda(1 - s).
#[derive(Clone, Debug)]
pub struct RankinLSeries {
    /// lambda[n] for n = 0..n_max; lambda[0] = 0.
    pub lambda: Vec<f64>,
    pub conductor: f64,
    pub sign: i32,
    /// Discriminant of the theta series used.
    pub disc: i64,
    pub mu: [f64; 4],
}

impl RankinLSeries {
    pub fn n_max(&self) -> usize {
        self.lambda.len().saturating_sub(1)
    }

    pub fn sqrt_q(&self) -> f64 {
        self.conductor.sqrt()
    }
}

/// 1 - e1 X + e2 X^2 - e3 X^3 + e4 X^4 = prod (1 - alpha_i beta_j X) for
/// prod(1 - alpha_i X) = 1 - a X + u X^2 and prod(1 - beta_j X) = 1 - b X + eta X^2.
/// Degenerate factors (u = 0 or eta = 0) drop the invisible parameters.
pub fn rankin_local_factor(a: f64, u: f64, b: f64, eta: f64) -> [f64; 5] {
    let e1 = a * b;
    let e2 = eta * a * a + u * b * b - 2.0 * u * eta;
    let e3 = u * eta * a * b;
    let e4 = u * u * eta * eta;
    [1.0, -e1, e2, -e3, e4]
}

/// Power series 1/R(X) to degree n.
pub fn invert_series(r: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    out[0] = 1.0 / r[0];
    for k in 1..=n {
        let s: f64 = (1..=k.min(r.len() - 1)).map(|j| r[j] * out[k - j]).sum();
        out[k] = -s / r[0];
    }
    out
}

/// Coefficients of f x theta for a weight-2 newform of level `level` with
/// a[n] = a_n (a[0] unused) and a theta series of discriminant theta.disc.
pub fn rankin_coeffs(a: &[i64], level: u64, theta: &ThetaSeries, n_max: usize) -> Result<RankinLSeries, LError> {
    if a.len() <= n_max || theta.b.len() <= n_max {
        return Err(LError::InsufficientCoefficients { needed: n_max });
    }
    let w = theta.b[1].re;
    if w <= 0.0 {
        return Err(LError::Domain("theta series has b_1 = 0".into()));
    }
    let spf = smallest_prime_factors(n_max.max(2));
    let mut lambda = vec![0.0; n_max + 1];
    if n_max >= 1 {
        lambda[1] = 1.0;
    }
    // lambda at prime powers, normalized by q^{k/2}
    let mut local: std::collections::HashMap<usize, Vec<f64>> = Default::default();
    for q in 2..=n_max {
        if spf[q] as usize != q {
            continue;
        }
        let qf = q as f64;
        let u = if level.is_multiple_of(q as u64) { 0.0 } else { qf };
        let eta = kronecker(theta.disc, q as u64) as f64;
        let b = theta.b[q].re / w;
        let r = rankin_local_factor(a[q] as f64 / qf.sqrt(), u / qf, b, eta);
        let mut kmax = 1;
        while (q as u128).pow(kmax + 1) <= n_max as u128 {
            kmax += 1;
        }
        local.insert(q, invert_series(&r, kmax as usize));
    }
    for n in 2..=n_max {
        let q = spf[n] as usize;
        let (mut m, mut k) = (n, 0);
        while m % q == 0 {
            m /= q;
            k += 1;
        }
        lambda[n] = local[&q][k] * lambda[m];
    }
    let q = level as f64 * level as f64 * theta.disc as f64 * theta.disc as f64;
    Ok(RankinLSeries { lambda, conductor: q, sign: -1, disc: theta.disc, mu: [0.0, 0.0, 1.0, 1.0] })
}

/// Coefficients needed for the Lambda expansion split at `a`.
pub fn required_terms(conductor: f64, split: f64) -> usize {
    (X_CUT * conductor.sqrt() / split.min(1.0 / split)).ceil() as usize
}

fn chunked_sum<F: Fn(usize) -> Complex64 + Sync>(n_max: usize, f: F) -> Complex64 {
    // fixed chunks keep the summation order independent of the thread count
    const CHUNK: usize = 4096;
    let parts: Vec<Complex64> = (0..n_max.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = (c * CHUNK).max(1);
            let hi = ((c + 1) * CHUNK).min(n_max + 1);
            (lo..hi).map(&f).sum()
        })
        .collect();
    parts.into_iter().sum()
}

fn binom(k: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// d^k/ds^k Lambda(s), the integral over Theta split at t = split.
pub fn lambda_value_split(l: &RankinLSeries, s: Complex64, k: u32, split: f64) -> Result<Complex64, LError> {
    if k > 2 {
        return Err(LError::Domain(format!("derivative order {k} > 2")));
    }
    let sq = l.sqrt_q();
    let needed = required_terms(l.conductor, split);
    if l.n_max() < needed {
        return Err(LError::InsufficientCoefficients { needed });
    }
    let t_min = split.min(1.0 / split) / sq;
    let one = Complex64::new(1.0, 0.0);
    let tab_s: Vec<MellinTable> = (0..=k).map(|j| MellinTable::new(s, j, t_min)).collect();
    let tab_r: Vec<MellinTable> = (0..=k).map(|j| MellinTable::new(one - s, j, t_min)).collect();
    let eps = l.sign as f64;
    let sgn = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let n_used = needed.min(l.n_max());
    Ok(chunked_sum(n_used, |n| {
        let c = l.lambda[n];
        if c == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let lg = (sq / n as f64).ln();
        let t1 = n as f64 * split / sq;
        let t2 = n as f64 / (split * sq);
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for j in 0..=k {
            let w = binom(k, j) * lg.powi((k - j) as i32);
            a += tab_s[j as usize].eval(t1) * w;
            b += tab_r[j as usize].eval(t2) * w;
        }
        ((s * lg).exp() * a + eps * sgn * ((one - s) * lg).exp() * b) * c
    }))
}

pub fn lambda_value(l: &RankinLSeries, s: Complex64, k: u32) -> Result<Complex64, LError> {
    lambda_value_split(l, s, k, 1.0)
}

/// Theta(t) = sum lambda_n phi(n t / sqrt Q).
pub fn theta_function(l: &RankinLSeries, t: f64) -> Result<f64, LError> {
    let sq = l.sqrt_q();
    let needed = (X_CUT * sq / t).ceil() as usize;
    if l.n_max() < needed {
        return Err(LError::InsufficientCoefficients { needed });
    }
    let tab = PhiTable::new(t / sq);
    Ok(chunked_sum(needed, |n| Complex64::new(l.lambda[n] * tab.eval(n as f64 * t / sq), 0.0)).re)
}

/// |Theta(1/t) - sign t Theta(t)|.
pub fn fe_residual(l: &RankinLSeries, t: f64) -> Result<f64, LError> {
    Ok((theta_function(l, 1.0 / t)? - l.sign as f64 * t * theta_function(l, t)?).abs())
}

/// |Lambda(0.7) - sign Lambda(0.3)| relative to |Lambda(0.7)|, with the terms
/// already needed for the central derivative.
pub fn symmetry_residual(l: &RankinLSeries) -> Result<f64, LError> {
    let a = lambda_value(l, Complex64::new(0.7, 0.0), 0)?;
    let b = lambda_value(l, Complex64::new(0.3, 0.0), 0)?;
    Ok((a - l.sign as f64 * b).norm() / a.norm().max(1.0))
}

/// Tolerance for the functional-equation self-tests: 0.3 of the carried digits.
pub fn fe_tolerance() -> f64 {
    10f64.powf(-0.3 * crate::F64_DIGITS as f64)
}

/// L'(f x theta_chi, 1) in the arithmetic normalization (center 1).
pub fn central_derivative(l: &RankinLSeries) -> Result<f64, LError> {
    let d = lambda_value(l, Complex64::new(0.5, 0.0), 1)?;
    Ok(PI * PI * d.re / l.conductor.powf(0.25))
}

/// Q prod (1 + |i t - mu_j|).
pub fn analytic_conductor(q: f64, t: f64) -> f64 {
    [0.0, 0.0, 1.0, 1.0].iter().fold(q, |acc, &mu: &f64| acc * (1.0 + (t * t + mu * mu).sqrt()))
}

/// The L-series of chi on Pic(O_c), passing to the primitive character first.
#[derive(Clone, Debug)]
pub struct CharacterLSeries {
    pub chi: Character,
    pub c_prime: u64,
    pub h_prime: usize,
    pub series: RankinLSeries,
}

pub fn character_lseries(a: &[i64], level: u64, big_d: u64, c: u64, chi: &Character, n_max: usize) -> Result<CharacterLSeries, LError> {
    let order = QuadOrder::new(big_d, c).map_err(|e| LError::Domain(e.to_string()))?;
    let pic = reduced_forms(order.disc()).map_err(|e| LError::Domain(e.to_string()))?;
    let prim = primitive_character(big_d, c, &pic, chi)?;
    let theta = theta_coeffs(&prim.pic, &prim.chi, n_max);
    let series = rankin_coeffs(a, level, &theta, n_max)?;
    Ok(CharacterLSeries { chi: chi.clone(), c_prime: prim.c, h_prime: prim.pic.h(), series })
}

/// Every character of Pic(O_c), each with its L-series at its own conductor.
pub fn all_character_lseries(a: &[i64], level: u64, big_d: u64, c: u64) -> Result<Vec<CharacterLSeries>, LError> {
    let order = QuadOrder::new(big_d, c).map_err(|e| LError::Domain(e.to_string()))?;
    let pic = reduced_forms(order.disc()).map_err(|e| LError::Domain(e.to_string()))?;
    characters(&pic)
        .iter()
        .map(|chi| {
            let prim = primitive_character(big_d, c, &pic, chi)?;
            let q = (level * level) as f64 * (prim.pic.disc as f64).powi(2);
            let n = required_terms(q, 1.0);
            if a.len() <= n {
                return Err(LError::InsufficientCoefficients { needed: n });
            }
            let theta = theta_coeffs(&prim.pic, &prim.chi, n);
            Ok(CharacterLSeries { chi: chi.clone(), c_prime: prim.c, h_prime: prim.pic.h(), series: rankin_coeffs(a, level, &theta, n)? })
        })
        .collect()
}
