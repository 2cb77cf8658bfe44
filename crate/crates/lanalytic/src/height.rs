//! Canonical heights by local-height summation, naive heights, and the
//! Petersson norm of the newform.
//!
//! Heights are normalized so that h^(P) ~ h(x(P)) (37a1: h^((0,0)) = 0.0511...),
//! twice the Neron-function sum.
//! Local heights at non-archimedean places assume the point meets the identity
//! component of the Neron model, which holds on the curves used here.

use crate::LError;
use ecarith::ring::Ring;
use ecarith::{an_coeffs, CurveData, Point};
use modparam::{curve_lattice, elliptic_log, PeriodLattice};
use mpkernel::{cpoly, pi, BigComplex};
use num_complex::Complex64;
use ringclass::{RcfElem, RingClassField};
use rug::{Float, Integer, Rational};
use std::f64::consts::PI;

const BITS: u32 = 192;

fn perr(e: impl std::fmt::Display) -> LError {
    LError::Param(e.to_string())
}

/// Archimedean Neron function at z via the q-product.
pub fn archimedean_local_height(lat: &PeriodLattice, z: &BigComplex) -> f64 {
    let prec = BITS;
    let (_, _, mut u) = lat.reduce_u(&z.with_prec(prec));
    let tau = lat.tau.with_prec(prec);
    if u.im < 0 {
        u = &u + &tau;
    }
    let t = Float::with_val(prec, &u.im / &tau.im);
    let b2 = Float::with_val(prec, &t * &t) - &t + Float::with_val(prec, 1) / 6u32;
    // -1/2 B2(t) log|q| with log|q| = -2 pi Im tau
    let mut lam = Float::with_val(prec, &b2 * &tau.im) * pi(prec);
    let w = u.e2pii();
    let winv = w.inv();
    let q = tau.e2pii();
    let one = BigComplex::one(prec);
    lam -= (&one - &w).abs().ln();
    let mut qn = q.clone();
    let tol = Float::with_val(prec, 1) >> (prec as i32);
    for _ in 0..10_000 {
        let a = (&one - &(&qn * &w)).abs();
        let b = (&one - &(&qn * &winv)).abs();
        lam -= Float::with_val(prec, a * b).ln();
        if Float::with_val(prec, qn.abs() * (w.abs() + winv.abs())) < tol {
            break;
        }
        qn = &qn * &q;
    }
    lam.to_f64()
}

/// Weierstrass coordinates X = x + b2/12, Y = 2y + a1 x + a3 of a complex point.
fn wp_coords(e: &CurveData, x: &BigComplex, y: &BigComplex) -> (BigComplex, BigComplex) {
    let prec = x.prec();
    let [b2, _, _, _] = e.b_invariants();
    let big_x = x + &BigComplex::from_real(Float::with_val(prec, &b2) / 12u32);
    let big_y = &(&y.mul_i64(2) + &x.mul_real(&Float::with_val(prec, &e.a[0]))) + &BigComplex::from_real(Float::with_val(prec, &e.a[2]));
    (big_x, big_y)
}

fn local_at(e: &CurveData, lat: &PeriodLattice, x: &BigComplex, y: &BigComplex) -> Result<f64, LError> {
    let (bx, by) = wp_coords(e, x, y);
    let z = elliptic_log(&bx, &by, lat, BITS).map_err(perr)?;
    Ok(archimedean_local_height(lat, &z))
}

fn delta_term(e: &CurveData) -> f64 {
    Float::with_val(BITS, e.discriminant().abs()).ln().to_f64() / 12.0
}

fn log_int(n: &Integer) -> f64 {
    Float::with_val(BITS, Integer::from(n.abs_ref())).ln().to_f64()
}

/// h^(P) for P = (x, y) in E(Q); 0 at infinity.
pub fn canonical_height_q(e: &CurveData, p: &Point<Rational>) -> Result<f64, LError> {
    let Point::Affine(x, y) = p else { return Ok(0.0) };
    let lat = curve_lattice(e, BITS).map_err(perr)?;
    let xc = BigComplex::from_real(Float::with_val(BITS, x));
    let yc = BigComplex::from_real(Float::with_val(BITS, y));
    let lam = local_at(e, &lat, &xc, &yc)?;
    Ok(2.0 * (lam + 0.5 * log_int(x.denom()) + delta_term(e)))
}

/// <P, Q> = (h^(P + Q) - h^(P) - h^(Q)) / 2.
pub fn height_pairing_q(e: &CurveData, p: &Point<Rational>, q: &Point<Rational>) -> Result<f64, LError> {
    let curve = e.over_q();
    let s = curve.add(p, q).map_err(perr)?;
    Ok((canonical_height_q(e, &s)? - canonical_height_q(e, p)? - canonical_height_q(e, q)?) / 2.0)
}

/// Roots of F under sqrt(-D) -> i sqrt(D): one per complex place of K[c].
pub fn complex_places(field: &RingClassField, prec: u32) -> Vec<BigComplex> {
    let coeffs: Vec<BigComplex> = field.f.iter().map(|c| field.base.embed(c, prec + 64)).collect();
    let mut r = cpoly::roots(&coeffs, prec + 64);
    r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    r
}

/// Characteristic polynomial over Q of multiplication by `a` on K[c], monic,
/// lowest degree first.
pub fn charpoly_over_q(field: &RingClassField, a: &RcfElem) -> Vec<Rational> {
    let h = field.degree();
    let n = 2 * h;
    let k = &field.base;
    let sq = field.from_k(k.sqrt_minus_d());
    // column j: a * basis_j, basis = alpha^i and sqrt(-D) alpha^i
    let mut m = vec![vec![Rational::new(); n]; n];
    let mut pw = field.one();
    for i in 0..h {
        for (half, b) in [(0, pw.clone()), (1, field.mul(&pw, &sq))] {
            let col = half * h + i;
            let prod = field.coeffs(&field.mul(a, &b));
            for (r, c) in prod.iter().enumerate() {
                m[r][col] = c.u.clone();
                m[h + r][col] = c.v.clone();
            }
        }
        pw = field.mul(&pw, &field.alpha());
    }
    faddeev_leverrier(&m)
}

fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let mut out = vec![vec![Rational::new(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                if b[k][j] != 0 {
                    out[i][j] += Rational::from(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    out
}

fn faddeev_leverrier(a: &[Vec<Rational>]) -> Vec<Rational> {
    let n = a.len();
    let mut c = vec![Rational::new(); n + 1];
    c[n] = Rational::from(1);
    let mut mk = vec![vec![Rational::new(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matmul(a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        mk = next;
        let am = matmul(a, &mk);
        let tr = (0..n).fold(Rational::new(), |acc, i| acc + &am[i][i]);
        c[n - k] = -tr / Rational::from(k as u32);
    }
    c
}

/// Leading coefficient of the primitive integer multiple of a rational polynomial.
pub fn primitive_leading(p: &[Rational]) -> Integer {
    let l = p.iter().fold(Integer::from(1), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<Integer> = p.iter().map(|c| Integer::from(c.numer() * &l) / c.denom()).collect();
    let g = ints.iter().fold(Integer::new(), |acc, c| acc.gcd(c));
    let lead = ints.last().cloned().unwrap_or_default();
    (lead / g).abs()
}

/// Absolute logarithmic height of a in K[c].
pub fn naive_height_rcf(field: &RingClassField, a: &RcfElem) -> f64 {
    let d = 2 * field.degree();
    let a0 = primitive_leading(&charpoly_over_q(field, a));
    let arch: f64 = complex_places(field, BITS)
        .iter()
        .map(|r| {
            let v = field.embed(a, r).abs().to_f64();
            2.0 * v.max(1.0).ln()
        })
        .sum();
    (log_int(&a0) + arch) / d as f64
}

/// h^(P) for P in E(K[c]) on the curve's own integral model.
pub fn canonical_height_rcf(e: &CurveData, field: &RingClassField, p: &Point<RcfElem>) -> Result<f64, LError> {
    let Point::Affine(x, y) = p else { return Ok(0.0) };
    let h = field.degree();
    let lat = curve_lattice(e, BITS).map_err(perr)?;
    let mut arch = 0.0;
    for r in complex_places(field, BITS) {
        let xe = field.embed(x, &r).with_prec(BITS);
        let ye = field.embed(y, &r).with_prec(BITS);
        arch += 2.0 * local_at(e, &lat, &xe, &ye)?;
    }
    let a0 = primitive_leading(&charpoly_over_q(field, x));
    Ok(2.0 * ((arch + 0.5 * log_int(&a0)) / (2 * h) as f64 + delta_term(e)))
}

/// (f, f) = vol(C/Lambda) deg(phi) / (4 pi^2), Manin constant 1.
pub fn petersson_from_degree(volume: f64, modular_degree: f64) -> f64 {
    volume * modular_degree / (4.0 * PI * PI)
}

fn f_abs2(a: &[i64], w: Complex64) -> f64 {
    let q = (Complex64::new(0.0, 2.0 * PI) * w).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut qn = q;
    for &an in &a[1..] {
        acc += qn * an as f64;
        qn *= q;
        if qn.norm() < 1e-18 {
            break;
        }
    }
    acc.norm_sqr()
}

/// int |f|^2 dx dy over Gamma_0(N)\H by a midpoint mesh, for prime N. Coarse:
/// meant as a cross-check of `petersson_from_degree` to a fraction of a percent.
pub fn petersson_numeric(e: &CurveData, mesh: usize) -> Result<f64, LError> {
    let n = e.conductor;
    if !ecarith::numth::is_prime(n) {
        return Err(LError::Unsupported(format!("numeric Petersson norm needs prime level, got {n}")));
    }
    let nf = n as f64;
    let terms = (40.0 * nf / (2.0 * PI * 3f64.sqrt() / 2.0)).ceil() as usize + 10;
    let a = an_coeffs(e, terms);
    let v_top = 3.5;
    // the standard fundamental domain F
    let mut total = 0.0;
    let dx = 1.0 / mesh as f64;
    for i in 0..mesh {
        let x = -0.5 + (i as f64 + 0.5) * dx;
        let y0 = (1.0 - x * x).sqrt();
        total += column(&a, x, y0, v_top, mesh) * dx;
    }
    // the other N cosets fill the strip 0 <= u < 1 above the arcs |N w - k| = 1
    let cols = mesh * n as usize;
    let du = 1.0 / cols as f64;
    for i in 0..cols {
        let u = (i as f64 + 0.5) * du;
        let k = (u * nf).round();
        let off = u - k / nf;
        let v0 = (1.0 / (nf * nf) - off * off).max(0.0).sqrt();
        total += column(&a, u, v0, v_top, mesh) * du;
    }
    Ok(total)
}

fn column(a: &[i64], x: f64, y0: f64, y1: f64, mesh: usize) -> f64 {
    // Gauss-Legendre on log-spaced panels: |f|^2 varies on the scale of y
    let panels = mesh.max(8);
    let y0 = y0.max(1e-3);
    let r = (y1 / y0).powf(1.0 / panels as f64);
    let mut s = 0.0;
    let mut lo = y0;
    for _ in 0..panels {
        let hi = lo * r;
        let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (t, w) in [(-0.774_596_669_241_483_4, 5.0 / 9.0), (0.0, 8.0 / 9.0), (0.774_596_669_241_483_4, 5.0 / 9.0)] {
            s += w * h * f_abs2(a, Complex64::new(x, m + h * t));
        }
        lo = hi;
    }
    s
}
