//! Dense complex polynomials: evaluation, products of linear factors, interpolation, roots.

use crate::complex::BigComplex;
use rug::Float;

/// Coefficients are stored lowest degree first.
pub fn eval(coeffs: &[BigComplex], z: &BigComplex) -> BigComplex {
    let p = z.prec();
    let mut acc = BigComplex::zero(p);
    for c in coeffs.iter().rev() {
        acc = &(&acc * z) + c;
    }
    acc
}

/// Value and derivative by Horner.
pub fn eval_with_derivative(coeffs: &[BigComplex], z: &BigComplex) -> (BigComplex, BigComplex) {
    let p = z.prec();
    let mut v = BigComplex::zero(p);
    let mut dv = BigComplex::zero(p);
    for c in coeffs.iter().rev() {
        dv = &(&dv * z) + &v;
        v = &(&v * z) + c;
    }
    (v, dv)
}

/// Monic polynomial with the given roots.
pub fn from_roots(roots: &[BigComplex]) -> Vec<BigComplex> {
    let p = roots.first().map(|r| r.prec()).unwrap_or(64);
    let mut out = vec![BigComplex::one(p)];
    for r in roots {
        let mut next = vec![BigComplex::zero(p); out.len() + 1];
        for (i, c) in out.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &(c * r);
        }
        out = next;
    }
    out
}

/// The unique polynomial of degree < n through n points with distinct abscissae.
pub fn interpolate(xs: &[BigComplex], ys: &[BigComplex]) -> Vec<BigComplex> {
    let n = xs.len();
    assert_eq!(n, ys.len());
    let p = xs.iter().chain(ys).map(|z| z.prec()).max().unwrap_or(64);
    // Newton divided differences
    let mut dd: Vec<BigComplex> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            let den = &xs[i] - &xs[i - j];
            dd[i] = &num / &den;
        }
    }
    // expand the Newton form into monomials
    let mut out = vec![BigComplex::zero(p); n];
    for k in (0..n).rev() {
        // out = out * (x - xs[k]) + dd[k]
        let mut next = vec![BigComplex::zero(p); n];
        for i in 0..n {
            if i + 1 < n {
                next[i + 1] = &next[i + 1] + &out[i];
            }
            next[i] = &next[i] - &(&out[i] * &xs[k]);
        }
        next[0] = &next[0] + &dd[k];
        out = next;
    }
    out
}

/// All complex roots by Aberth iteration followed by Newton polishing.
pub fn roots(coeffs: &[BigComplex], prec: u32) -> Vec<BigComplex> {
    let mut c: Vec<BigComplex> = coeffs.iter().map(|z| z.with_prec(prec)).collect();
    while c.len() > 1 && c.last().map(|z| z.is_zero()).unwrap_or(false) {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return vec![];
    }
    let lead = c[n].clone();
    let c: Vec<BigComplex> = c.iter().map(|z| z / &lead).collect();
    // Cauchy radius for the initial circle
    let mut rad = Float::with_val(prec, 0);
    for z in &c[..n] {
        let a = z.abs();
        if a > rad {
            rad = a;
        }
    }
    let rad = Float::with_val(prec, rad + 1u32);
    let mut zs: Vec<BigComplex> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            let r = rad.to_f64() * 0.9;
            BigComplex::from_f64(prec, r * ang.cos(), r * ang.sin())
        })
        .collect();
    let tol = crate::complex::eps(prec, prec as i32 - 16);
    for _ in 0..(50 + 8 * prec as usize) {
        let mut maxstep = Float::with_val(prec, 0);
        for i in 0..n {
            let (v, dv) = eval_with_derivative(&c, &zs[i]);
            if v.is_zero() {
                continue;
            }
            let ratio = &v / &dv;
            let mut s = BigComplex::zero(prec);
            for j in 0..n {
                if i != j {
                    s = &s + &(&zs[i] - &zs[j]).inv();
                }
            }
            let denom = &BigComplex::one(prec) - &(&ratio * &s);
            let w = &ratio / &denom;
            zs[i] = &zs[i] - &w;
            let a = w.abs();
            let scale = Float::with_val(prec, zs[i].abs() + 1u32);
            let rel = Float::with_val(prec, a / scale);
            if rel > maxstep {
                maxstep = rel;
            }
        }
        if maxstep < tol {
            break;
        }
    }
    for z in zs.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = eval_with_derivative(&c, z);
            if dv.is_zero() || v.is_zero() {
                break;
            }
            *z = &*z - &(&v / &dv);
        }
    }
    zs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = 200;
        let coeffs: Vec<BigComplex> =
            [(1.0, 2.0), (-3.0, 0.5), (0.0, 1.0), (2.0, 0.0)].iter().map(|&(a, b)| BigComplex::from_f64(p, a, b)).collect();
        let xs: Vec<BigComplex> =
            [(0.1, 0.2), (1.0, -1.0), (-2.0, 0.3), (0.5, 0.5)].iter().map(|&(a, b)| BigComplex::from_f64(p, a, b)).collect();
        let ys: Vec<BigComplex> = xs.iter().map(|x| eval(&coeffs, x)).collect();
        let back = interpolate(&xs, &ys);
        for (a, b) in back.iter().zip(&coeffs) {
            assert!(a.dist(b) < 1e-50);
        }
    }

    #[test]
    fn roots_of_product() {
        let p = 256;
        let rs: Vec<BigComplex> =
            [(1.0, 0.0), (-2.0, 0.0), (0.5, 3.0), (0.5, -3.0), (7.0, 1.0)].iter().map(|&(a, b)| BigComplex::from_f64(p, a, b)).collect();
        let poly = from_roots(&rs);
        let found = roots(&poly, p);
        for r in &rs {
            let best = found.iter().map(|f| f.dist(r).to_f64()).fold(f64::MAX, f64::min);
            assert!(best < 1e-60, "{best}");
        }
    }
}
