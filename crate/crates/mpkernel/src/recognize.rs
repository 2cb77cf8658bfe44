//! Recognition of exact numbers from floating approximations.

use crate::complex::BigComplex;
use crate::lll::{lll_reduce, IntLattice};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

/// Rational approximation together with the denominator bound it was found under.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalApprox {
    pub value: Rational,
    pub den_bound: Integer,
}

/// Best continued-fraction convergent of `x` with denominator at most `max_den`,
/// accepted only when it lies within 1/(2 max_den^2) of `x`.
pub fn rational_reconstruct(x: &Float, max_den: &Integer) -> Option<RationalApprox> {
    if !x.is_finite() || *max_den < 1 {
        return None;
    }
    let exact = x.to_rational()?;
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let mut rem = exact.clone();
    let mut best: Option<Rational> = None;
    loop {
        let a = rem.floor_ref();
        let a = Integer::from(Rational::from(a).numer());
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        if k2 > *max_den {
            break;
        }
        best = Some(Rational::from((h2.clone(), k2.clone())));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = rem.clone() - a;
        if frac == 0 {
            break;
        }
        rem = frac.recip();
    }
    let cand = best?;
    let dist = (exact - &cand).abs();
    let bound = Rational::from((1, Integer::from(max_den.square_ref()) * 2u32));
    if dist < bound {
        Some(RationalApprox { value: cand, den_bound: max_den.clone() })
    } else {
        None
    }
}

/// Nearest integer to a float.
pub fn round_to_integer(x: &Float) -> Integer {
    x.to_integer().unwrap_or_default()
}

fn poly_eval(p: &[Integer], z: &BigComplex) -> BigComplex {
    let prec = z.prec();
    let mut acc = BigComplex::zero(prec);
    for c in p.iter().rev() {
        acc = &(&acc * z) + &BigComplex::from_real(Float::with_val(prec, c));
    }
    acc
}

/// Searches for a primitive integer polynomial of degree at most `degree` vanishing at `z`
/// to within the recognition threshold. The answer is only a candidate.
pub fn algdep(z: &BigComplex, degree: usize, precision: u32) -> Option<Vec<Integer>> {
    if degree == 0 {
        return None;
    }
    let n = degree + 1;
    let work = precision + 64 + (degree as u32) * 8;
    let zw = z.with_prec(work);
    let mut pows = vec![BigComplex::one(work)];
    for i in 1..n {
        pows.push(&pows[i - 1] * &zw);
    }
    let maxabs = pows.iter().map(|p| p.abs()).fold(Float::with_val(work, 1), |a, b| if b > a { b } else { a });
    let scale = Float::with_val(work, 2).pow(precision as i32) / maxabs;
    let has_imag = z.im.clone().abs() > Float::with_val(work, 2).pow(-(precision as i32) / 2) * z.abs();
    let mut rows = Vec::with_capacity(n);
    for (i, p) in pows.iter().enumerate() {
        let mut row = vec![Integer::new(); n];
        row[i] = Integer::from(1);
        row.push(round_to_integer(&Float::with_val(work, &p.re * &scale)));
        if has_imag {
            row.push(round_to_integer(&Float::with_val(work, &p.im * &scale)));
        }
        rows.push(row);
    }
    let lat = IntLattice::new(rows).ok()?;
    let red = lll_reduce(&lat, &Rational::from((99, 100))).ok()?;
    let mut poly: Vec<Integer> = red.basis[0][..n].to_vec();
    while poly.len() > 1 && poly.last().map(|c| *c == 0).unwrap_or(false) {
        poly.pop();
    }
    if poly.len() < 2 {
        return None;
    }
    let g = poly.iter().fold(Integer::new(), |g, c| g.gcd(c));
    for c in poly.iter_mut() {
        *c /= &g;
    }
    if *poly.last().unwrap() < 0 {
        for c in poly.iter_mut() {
            *c = Integer::from(-&*c);
        }
    }
    let val = poly_eval(&poly, &zw).abs();
    let cmax = poly.iter().map(|c| Integer::from(c.abs_ref())).max().unwrap_or_default();
    let thresh = Float::with_val(work, 2).pow(-(precision as i32) / 4) * Float::with_val(work, &cmax);
    if val < thresh {
        Some(poly)
    } else {
        None
    }
}
