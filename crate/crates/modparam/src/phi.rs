//! The modular parametrization as a truncated q-expansion with a certified tail.

use crate::ParamError;
use mpkernel::BigComplex;
use rug::ops::Pow;
use rug::Float;

/// Sum of a_n/n q^n up to n = terms_used, reduced nowhere (the caller reduces mod the lattice).
#[derive(Clone, Debug)]
pub struct ModularImage {
    pub z: BigComplex,
    pub terms_used: usize,
    pub tail_bound: Float,
}

/// Bound on sum_{n > m} |a_n|/n r^n using |a_n| <= d(n) sqrt(n) <= sqrt(3) n.
pub fn tail_bound(im_tau: f64, m: usize) -> f64 {
    let r = (-2.0 * std::f64::consts::PI * im_tau).exp();
    3f64.sqrt() * r.powi(m as i32 + 1) / (1.0 - r)
}

/// Log base 2 of the tail bound, robust where the bound underflows f64.
fn log2_tail(im_tau: f64, m: usize) -> f64 {
    let lr = -2.0 * std::f64::consts::PI * im_tau / std::f64::consts::LN_2;
    let r = (-2.0 * std::f64::consts::PI * im_tau).exp();
    0.5 * 3f64.log2() + lr * (m as f64 + 1.0) - (1.0 - r).log2()
}

/// Smallest m with tail bound below 2^{-bits}.
pub fn required_terms(im_tau: f64, bits: u32) -> usize {
    let mut m = 1usize;
    while log2_tail(im_tau, m) >= -(bits as f64) {
        m = if m < 64 { m + 1 } else { m + m / 8 };
    }
    // walk back down to the least admissible value
    while m > 1 && log2_tail(im_tau, m - 1) < -(bits as f64) {
        m -= 1;
    }
    m
}

/// phi(tau) = sum a_n/n e^{2 pi i n tau}; `a[n]` holds a_n, index 0 unused.
pub fn phi_tau(a: &[i64], tau: &BigComplex, bits: u32) -> Result<ModularImage, ParamError> {
    let y = tau.im.to_f64();
    if y <= 0.0 {
        return Err(ParamError::NotInUpperHalfPlane);
    }
    let m = required_terms(y, bits);
    if a.len() <= m {
        return Err(ParamError::TooFewCoefficients { required: m, supplied: a.len().saturating_sub(1) });
    }
    let wp = bits + 32 + (m as f64).log2().ceil() as u32;
    let q = tau.with_prec(wp).e2pii();
    let mut qn = BigComplex::one(wp);
    let mut s = BigComplex::zero(wp);
    for (n, &an) in a.iter().enumerate().take(m + 1).skip(1) {
        qn = &qn * &q;
        if an != 0 {
            s = &s + &qn.mul_real(&(Float::with_val(wp, an) / n as u32));
        }
    }
    let tb = Float::with_val(bits, 2).pow(Float::with_val(bits, log2_tail(y, m)));
    Ok(ModularImage { z: s.with_prec(bits), terms_used: m, tail_bound: tb })
}
