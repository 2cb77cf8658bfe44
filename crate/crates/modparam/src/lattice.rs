//! Period lattices by the AGM and the Weierstrass functions by q-series.

use crate::ParamError;
use ecarith::{CurveData, ShortWeierstrass};
use mpkernel::{cpoly, pi, BigComplex};
use rug::ops::Pow;
use rug::{Float, Rational};

/// Lattice omega1 Z + omega2 Z with tau = omega2/omega1 reduced to the fundamental domain.
#[derive(Clone, Debug)]
pub struct PeriodLattice {
    pub omega1: BigComplex,
    pub omega2: BigComplex,
    pub tau: BigComplex,
    pub real_volume: Float,
    /// Least positive real element of the lattice.
    pub real_period: Float,
    /// Curve invariants g2 = c4/12 and g3 = c6/216.
    pub g2: Float,
    pub g3: Float,
    pub prec: u32,
}

fn agm(a: Float, b: Float) -> Result<Float, ParamError> {
    let prec = a.prec();
    let (mut a, mut b) = (a, b);
    for _ in 0..(64 + 2 * prec.ilog2()) {
        let diff = Float::with_val(prec, &a - &b).abs();
        let tol = Float::with_val(prec, a.clone().abs() >> (prec as i32 - 4));
        if diff <= tol {
            return Ok(a);
        }
        let na = Float::with_val(prec, &a + &b) / 2u32;
        let nb = Float::with_val(prec, &a * &b).sqrt();
        a = na;
        b = nb;
    }
    Err(ParamError::AgmDiverged(prec))
}

/// The Neron lattice of the curve with b-invariants (b2, b4, b6) and invariants c4, c6.
pub fn lattice_from_invariants(b: [Rational; 3], c4: &Rational, c6: &Rational, prec: u32) -> Result<PeriodLattice, ParamError> {
    let wp = prec + 64;
    let [b2, b4, b6] = b;
    let fl = |q: &Rational| Float::with_val(wp, q);
    let cubic = vec![
        BigComplex::from_real(fl(&b6)),
        BigComplex::from_real(fl(&(b4.clone() * 2u32))),
        BigComplex::from_real(fl(&b2)),
        BigComplex::from_i64(wp, 4),
    ];
    let roots = cpoly::roots(&cubic, wp);
    // disc of the cubic has the sign of the curve discriminant
    let disc = c4.clone().pow(3u32) - c6.clone().pow(2u32);
    if disc == 0 {
        return Err(ParamError::Singular);
    }
    let pi = pi(wp);
    let (w1, w2) = if disc > 0 {
        let mut e: Vec<Float> = roots.iter().map(|r| r.re.clone()).collect();
        e.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let s13 = Float::with_val(wp, &e[0] - &e[2]).sqrt();
        let s12 = Float::with_val(wp, &e[0] - &e[1]).sqrt();
        let s23 = Float::with_val(wp, &e[1] - &e[2]).sqrt();
        let w1 = Float::with_val(wp, &pi / agm(s13.clone(), s12)?);
        let w2 = Float::with_val(wp, &pi / agm(s13, s23)?);
        (BigComplex::from_real(w1), BigComplex::new(Float::with_val(wp, 0), w2))
    } else {
        let e1 = roots
            .iter()
            .min_by(|x, y| x.im.clone().abs().partial_cmp(&y.im.clone().abs()).unwrap())
            .unwrap()
            .re
            .clone();
        let a = Float::with_val(wp, &e1 * 3u32) + fl(&b2) / 4u32;
        let bb = Float::with_val(wp, e1.clone().square() * 3u32) + fl(&b2) * &e1 / 2u32 + fl(&b4) / 2u32;
        let bb = bb.sqrt();
        let two_sqrt_b = Float::with_val(wp, bb.clone().sqrt() * 2u32);
        let p_ = Float::with_val(wp, Float::with_val(wp, &bb * 2u32) + &a).sqrt();
        let m_ = Float::with_val(wp, Float::with_val(wp, &bb * 2u32) - &a).sqrt();
        let w1 = Float::with_val(wp, Float::with_val(wp, &pi * 2u32) / agm(two_sqrt_b.clone(), p_)?);
        let im2 = Float::with_val(wp, &pi / agm(two_sqrt_b, m_)?);
        let re2 = Float::with_val(wp, -&w1) / 2u32;
        (BigComplex::from_real(w1), BigComplex::new(re2, im2))
    };
    let real_period = w1.re.clone();
    let g2 = Float::with_val(wp, c4) / 12u32;
    let g3 = Float::with_val(wp, c6) / 216u32;
    let mut lat = reduce_basis(w1, w2, wp);
    lat.real_period = real_period;
    lat.g2 = g2;
    lat.g3 = g3;
    lat.prec = prec;
    let (eg2, eg3) = eisenstein_invariants(&lat);
    let tol = Float::with_val(wp, 1) >> (prec as i32 - 16);
    let scale = Float::with_val(wp, lat.g2.clone().abs() + lat.g3.clone().abs() + 1u32);
    let r2 = Float::with_val(wp, (&eg2 - &BigComplex::from_real(lat.g2.clone())).abs() / &scale);
    let r3 = Float::with_val(wp, (&eg3 - &BigComplex::from_real(lat.g3.clone())).abs() / &scale);
    if r2 > tol || r3 > tol {
        return Err(ParamError::LatticeMismatch(r2.to_f64().max(r3.to_f64())));
    }
    Ok(lat)
}

/// Lattice of y^2 = x^3 + A x + B; g2 = -4A, g3 = -4B.
pub fn period_lattice(e: &ShortWeierstrass, prec: u32) -> Result<PeriodLattice, ParamError> {
    let b = [Rational::new(), e.a.clone() * 2u32, e.b.clone() * 4u32];
    let c4 = e.a.clone() * -48i32;
    let c6 = e.b.clone() * -864i32;
    lattice_from_invariants(b, &c4, &c6, prec)
}

/// Lattice of a curve in the database, on its given model.
pub fn curve_lattice(e: &CurveData, prec: u32) -> Result<PeriodLattice, ParamError> {
    let [b2, b4, b6, _] = e.b_invariants();
    lattice_from_invariants([b2.into(), b4.into(), b6.into()], &e.c4().into(), &e.c6().into(), prec)
}

fn reduce_basis(w1: BigComplex, w2: BigComplex, wp: u32) -> PeriodLattice {
    let (mut w1, mut w2) = (w1, w2);
    let mut tau = &w2 / &w1;
    if tau.im < 0 {
        w2 = -&w2;
        tau = -&tau;
    }
    for _ in 0..200 {
        let k = tau.re.clone().round();
        if k != 0 {
            w2 = &w2 - &w1.mul_real(&k);
            tau = &w2 / &w1;
        }
        if tau.norm_sqr() < 1 {
            // tau -> -1/tau
            let nw1 = w2.clone();
            w2 = -&w1;
            w1 = nw1;
            tau = &w2 / &w1;
        } else {
            break;
        }
    }
    let vol = Float::with_val(wp, &w1.re * &w2.im) - Float::with_val(wp, &w1.im * &w2.re);
    PeriodLattice {
        omega1: w1,
        omega2: w2,
        tau,
        real_volume: vol.abs(),
        real_period: Float::new(wp),
        g2: Float::new(wp),
        g3: Float::new(wp),
        prec: wp,
    }
}

/// g2, g3 recomputed from the lattice by Eisenstein series.
pub fn eisenstein_invariants(l: &PeriodLattice) -> (BigComplex, BigComplex) {
    let wp = l.omega1.prec();
    let q = l.tau.e2pii();
    let mut s3 = BigComplex::zero(wp);
    let mut s5 = BigComplex::zero(wp);
    let mut qn = BigComplex::one(wp);
    let tol = Float::with_val(wp, 1) >> (wp as i32);
    for n in 1u64..10_000 {
        qn = &qn * &q;
        let (mut d3, mut d5) = (Float::with_val(wp, 0), Float::with_val(wp, 0));
        for d in 1..=n {
            if n % d == 0 {
                d3 += Float::with_val(wp, d).pow(3u32);
                d5 += Float::with_val(wp, d).pow(5u32);
            }
        }
        s3 = &s3 + &qn.mul_real(&d3);
        s5 = &s5 + &qn.mul_real(&d5);
        if Float::with_val(wp, qn.abs() * &d5) < tol {
            break;
        }
    }
    let two_pi_over = (BigComplex::from_real(pi(wp) * 2u32)) / l.omega1.clone();
    let t4 = two_pi_over.pow_u64(4);
    let t6 = two_pi_over.pow_u64(6);
    let e4 = &BigComplex::one(wp) + &s3.mul_i64(240);
    let e6 = &BigComplex::one(wp) - &s5.mul_i64(504);
    ((&t4 * &e4).div_i64(12), (&t6 * &e6).div_i64(216))
}

impl PeriodLattice {
    /// z reduced to u = z/omega1 in the centred period parallelogram; returns (m, n, u)
    /// with z/omega1 = u + m + n tau.
    pub fn reduce_u(&self, z: &BigComplex) -> (Float, Float, BigComplex) {
        let u = z / &self.omega1;
        let n = Float::with_val(u.prec(), &u.im / &self.tau.im).round();
        let u = &u - &self.tau.mul_real(&n);
        let m = u.re.clone().round();
        let u = BigComplex::new(Float::with_val(u.prec(), &u.re - &m), u.im);
        (m, n, u)
    }

    /// z modulo the lattice, centred.
    pub fn reduce(&self, z: &BigComplex) -> BigComplex {
        let (_, _, u) = self.reduce_u(z);
        &u * &self.omega1
    }

    /// Does z lie on the lattice up to `bits` of relative precision?
    pub fn contains(&self, z: &BigComplex, bits: u32) -> bool {
        let (_, _, u) = self.reduce_u(z);
        u.abs() < (Float::with_val(u.prec(), 1) >> bits as i32)
    }
}

/// x (x/(1-x)^2) and its logarithmic derivative piece x(1+x)/(1-x)^3.
fn wp_terms(x: &BigComplex) -> (BigComplex, BigComplex) {
    let one = BigComplex::one(x.prec());
    let d = &one - x;
    let d2 = d.square();
    let t = x / &d2;
    let t1 = &(x * &(&one + x)) / &(&d2 * &d);
    (t, t1)
}

/// (p(z), p'(z)) for the lattice.
pub fn weierstrass_p(z: &BigComplex, l: &PeriodLattice, prec: u32) -> Result<(BigComplex, BigComplex), ParamError> {
    let wp = prec + 32;
    let z = z.with_prec(wp);
    let (_, _, u) = l.reduce_u(&z);
    if u.abs() < (Float::with_val(wp, 1) >> (prec as i32 - 4)) {
        return Err(ParamError::Pole);
    }
    let tau = l.tau.with_prec(wp);
    let q = tau.e2pii();
    let w = u.e2pii();
    let winv = w.inv();
    let (mut s, mut sp) = wp_terms(&w);
    s = &s + &BigComplex::from_real(Float::with_val(wp, 1) / 12u32);
    let mut qn = BigComplex::one(wp);
    let tol = Float::with_val(wp, 1) >> (wp as i32);
    for _ in 0..100_000 {
        qn = &qn * &q;
        let (a, ap) = wp_terms(&(&qn * &w));
        let (b, bp) = wp_terms(&(&qn * &winv));
        let (c, _) = wp_terms(&qn);
        let term = &(&a + &b) - &c.mul_i64(2);
        let termp = &ap - &bp;
        s = &s + &term;
        sp = &sp + &termp;
        if term.abs() < tol && termp.abs() < tol {
            break;
        }
    }
    let k = &BigComplex::from_real(pi(wp) * 2u32).mul_i() / &l.omega1.with_prec(wp);
    let k2 = k.square();
    let p = &k2 * &s;
    let pp = &(&k2 * &k) * &sp;
    Ok((p.with_prec(prec), pp.with_prec(prec)))
}

/// Residual of (p')^2 = 4 p^3 - g2 p - g3.
pub fn differential_residual(p: &BigComplex, pp: &BigComplex, l: &PeriodLattice) -> Float {
    let g2 = BigComplex::from_real(l.g2.clone());
    let g3 = BigComplex::from_real(l.g3.clone());
    let rhs = &(&(&p.pow_u64(3).mul_i64(4) - &(&g2 * p)) - &g3);
    let scale = Float::with_val(p.prec(), pp.abs() + 1u32).square();
    Float::with_val(p.prec(), (&pp.square() - rhs).abs() / scale)
}

/// z with p(z) = X and p'(z) = Y, by a coarse grid followed by Newton.
pub fn elliptic_log(big_x: &BigComplex, big_y: &BigComplex, l: &PeriodLattice, prec: u32) -> Result<BigComplex, ParamError> {
    let coarse = 96;
    let grid = 24;
    let lc = PeriodLattice { omega1: l.omega1.with_prec(coarse), omega2: l.omega2.with_prec(coarse), tau: l.tau.with_prec(coarse), ..l.clone() };
    let xc = big_x.with_prec(coarse);
    let mut best: Option<(Float, BigComplex)> = None;
    for i in 0..grid {
        for j in 0..grid {
            let a = Float::with_val(coarse, 2 * i + 1) / (2 * grid) as u32;
            let b = Float::with_val(coarse, 2 * j + 1) / (2 * grid) as u32;
            let z = &lc.omega1.mul_real(&a) + &lc.omega2.mul_real(&b);
            let (p, _) = weierstrass_p(&z, &lc, coarse)?;
            let err = (&p - &xc).abs();
            if best.as_ref().map(|(e, _)| err < *e).unwrap_or(true) {
                best = Some((err, z));
            }
        }
    }
    let mut z = best.unwrap().1;
    let mut bits = coarse;
    loop {
        bits = (bits * 2).min(prec + 16);
        z = z.with_prec(bits);
        let lb = PeriodLattice { omega1: l.omega1.with_prec(bits), omega2: l.omega2.with_prec(bits), tau: l.tau.with_prec(bits), ..l.clone() };
        let target = big_x.with_prec(bits);
        for _ in 0..60 {
            let (p, pp) = weierstrass_p(&z, &lb, bits)?;
            let step = &(&p - &target) / &pp;
            z = &z - &step;
            if step.abs() < (Float::with_val(bits, z.abs() + 1u32) >> (bits as i32 - 8)) {
                break;
            }
        }
        if bits >= prec + 16 {
            break;
        }
    }
    let (_, pp) = weierstrass_p(&z, l, prec)?;
    let tol = Float::with_val(prec, big_y.abs() + 1u32) >> (prec as i32 / 2);
    if (&pp - big_y).abs() > tol {
        z = -&z;
        let (_, pp2) = weierstrass_p(&z, l, prec)?;
        if (&pp2 - big_y).abs() > tol {
            return Err(ParamError::NotOnCurve);
        }
    }
    Ok(l.reduce(&z.with_prec(prec)))
}
