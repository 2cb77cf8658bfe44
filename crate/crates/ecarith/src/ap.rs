//! Traces of Frobenius and the Fourier coefficients a_n.

use crate::curve::{CurveData, CurveError};
use crate::numth::{factor, is_prime, primes_up_to, smallest_prime_factors};
use crate::point::{Curve, Point};
use crate::ring::{PrimeField, Ring};
use rayon::prelude::*;
use std::collections::HashMap;

/// Primes at or below this are counted directly.
pub const DIRECT_COUNT_LIMIT: u64 = 1 << 16;

/// a_p = p + 1 - #E(F_p) at a prime of good reduction.
pub fn ap_count(e: &CurveData, p: u64) -> Result<i64, CurveError> {
    if !is_prime(p) {
        return Err(CurveError::NotPrime(p));
    }
    if e.is_bad(p) {
        return Err(CurveError::BadPrime(p));
    }
    Ok(if p <= DIRECT_COUNT_LIMIT { ap_direct(e, p) } else { ap_bsgs(e, p) })
}

/// a_p from the point count, also meaningful at bad primes (where it is 0 or +-1).
pub fn ap_any(e: &CurveData, p: u64) -> i64 {
    if p <= DIRECT_COUNT_LIMIT || e.is_bad(p) {
        ap_direct(e, p)
    } else {
        ap_bsgs(e, p)
    }
}

/// Exhaustive count: Legendre sum for odd p, full enumeration at 2.
pub fn ap_direct(e: &CurveData, p: u64) -> i64 {
    let f = PrimeField::new(p);
    if p == 2 {
        let a: Vec<u64> = e.a.iter().map(|c| f.reduce_integer(c)).collect();
        let mut count = 1i64;
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = y * y + a[0] * x * y + a[2] * y;
                let rhs = x * x * x + a[1] * x * x + a[3] * x + a[4];
                if (lhs + rhs).is_multiple_of(2) {
                    count += 1;
                }
            }
        }
        return 3 - count;
    }
    let [b2, b4, b6, _] = e.b_invariants();
    let b2 = f.reduce_integer(&b2);
    let b4 = f.reduce_integer(&b4) * 2 % p;
    let b6 = f.reduce_integer(&b6);
    // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for y in 1..=(p / 2) {
        chi[(y * y % p) as usize] = 1;
    }
    let mut s = 0i64;
    for x in 0..p {
        let v = (((4 * x + b2) % p * x + b4) % p * x + b6) % p;
        s += chi[v as usize] as i64;
    }
    -s
}

fn order_of(curve: &Curve<PrimeField>, pt: &Point<u64>, multiple: u64) -> u64 {
    let mut ord = multiple;
    for (q, _) in factor(multiple) {
        while ord.is_multiple_of(q) && curve.mul_i64((ord / q) as i64, pt).unwrap().is_infinity() {
            ord /= q;
        }
    }
    ord
}

/// Baby-step giant-step on the model y^2 = x^3 - 27 c4 x - 54 c6 over F_p, p > 3.
pub fn ap_bsgs(e: &CurveData, p: u64) -> i64 {
    let f = PrimeField::new(p);
    let a = f.reduce_integer(&(-e.c4() * 27));
    let b = f.reduce_integer(&(-e.c6() * 54));
    let curve = Curve::short(f, a, b);
    let s = (p as f64).sqrt();
    let lo = p + 1 - (2.0 * s).floor() as u64;
    let hi = p + 1 + (2.0 * s).floor() as u64;
    let width = hi - lo;
    let m = (width as f64).sqrt().ceil() as u64 + 1;
    let mut lcm = 1u64;
    let mut x0 = 0u64;
    for _ in 0..20 {
        // next point with smallest x, deterministic
        let pt = loop {
            let rhs = f.add(&f.mul(&f.add(&f.mul(&x0, &x0), &a), &x0), &b);
            x0 += 1;
            if let Some(y) = f.sqrt(rhs) {
                break Point::Affine(x0 - 1, y);
            }
        };
        let mut baby: HashMap<u64, u64> = HashMap::new();
        let mut cur = Point::Infinity;
        for j in 0..=m {
            if let Point::Affine(x, _) = &cur {
                baby.entry(*x).or_insert(j);
            }
            cur = curve.add(&cur, &pt).unwrap();
        }
        let step = curve.mul_i64(m as i64, &pt).unwrap();
        let mut giant = curve.mul_i64(lo as i64, &pt).unwrap();
        let mut found = None;
        let mut i = 0u64;
        while i * m <= width + m {
            let k0 = lo + i * m;
            match &giant {
                Point::Infinity => {
                    found = Some(k0);
                }
                Point::Affine(x, _) => {
                    if let Some(&j) = baby.get(x) {
                        for cand in [k0 + j, k0.saturating_sub(j)] {
                            if cand > 0 && curve.mul_i64(cand as i64, &pt).unwrap().is_infinity() {
                                found = Some(cand);
                                break;
                            }
                        }
                    }
                }
            }
            if found.is_some() {
                break;
            }
            giant = curve.add(&giant, &step).unwrap();
            i += 1;
        }
        let Some(k) = found else { break };
        let ord = order_of(&curve, &pt, k);
        lcm = lcm / crate::numth::gcd(lcm, ord) * ord;
        let cands: Vec<u64> = (lo / lcm..=hi / lcm + 1).map(|t| t * lcm).filter(|n| *n >= lo && *n <= hi).collect();
        if cands.len() == 1 {
            return p as i64 + 1 - cands[0] as i64;
        }
    }
    ap_direct(e, p)
}

/// Fourier coefficients; entry n holds a_n and entry 0 is unused (zero).
pub fn an_coeffs(e: &CurveData, n_max: usize) -> Vec<i64> {
    let ps = primes_up_to(n_max);
    let aps: HashMap<u64, i64> = ps.par_iter().map(|&p| (p, ap_any(e, p))).collect();
    let spf = smallest_prime_factors(n_max);
    let mut an = vec![0i64; n_max + 1];
    if n_max >= 1 {
        an[1] = 1;
    }
    for n in 2..=n_max {
        let p = spf[n] as usize;
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        if m > 1 {
            an[n] = an[n / m] * an[m];
            continue;
        }
        let ap = aps[&(p as u64)];
        an[n] = if n == p {
            ap
        } else if e.is_bad(p as u64) {
            ap * an[n / p]
        } else {
            ap * an[n / p] - p as i64 * an[n / p / p]
        };
    }
    an
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bsgs_agrees_with_direct_count() {
        let e = CurveData::new("389A1", [0, 1, 1, -2, 0], 389, 1, Some(40), 1);
        for p in (65537u64..66000).chain(100_000..100_200).filter(|&p| is_prime(p)).step_by(7) {
            assert_eq!(ap_bsgs(&e, p), ap_direct(&e, p), "p = {p}");
        }
    }
}
