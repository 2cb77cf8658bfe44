//! The kernel phi(t) = 8 sqrt(t) K_0(4 pi sqrt(t)), inverse Mellin transform of
//! gamma(s) = Gamma_C(s + 1/2)^2, and its incomplete Mellin transforms.
//!
//! Everything here is double precision. Integrals run in u = log x, where the
//! integrands are smooth and decay like exp(-4 pi e^{u/2}).

use crate::LError;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Beyond this phi(x) < 1e-40 and is treated as zero.
pub const X_MAX: f64 = 80.0;
/// Terms with argument past this contribute below 1e-19 and are dropped.
pub const X_CUT: f64 = 14.0;

fn bessel_k(z: f64, nu1: bool) -> f64 {
    // K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt; trapezoid, exact to f64
    let h = (0.5 / z.sqrt()).min(0.1);
    let mut sum = 0.5 * (-z).exp();
    let mut k = 1.0;
    loop {
        let t = k * h;
        let c = t.cosh();
        let e = (-z * c).exp();
        let term = if nu1 { e * c } else { e };
        sum += term;
        if z * c > 745.0 || term < 1e-18 * sum {
            break;
        }
        k += 1.0;
    }
    sum * h
}

pub fn bessel_k0(z: f64) -> f64 {
    bessel_k(z, false)
}

pub fn bessel_k1(z: f64) -> f64 {
    bessel_k(z, true)
}

/// gamma(s) = Gamma_C(s + 1/2)^2 with Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s), real s > -1/2.
pub fn gamma_factor(s: f64) -> f64 {
    let g = 2.0 * (2.0 * PI).powf(-(s + 0.5)) * libm::tgamma(s + 0.5);
    g * g
}

pub fn inverse_mellin_phi(t: f64) -> Result<f64, LError> {
    if !(t > 0.0) {
        return Err(LError::Domain(format!("phi needs t > 0, got {t}")));
    }
    Ok(phi(t))
}

pub(crate) fn phi(t: f64) -> f64 {
    if t > X_MAX {
        return 0.0;
    }
    8.0 * t.sqrt() * bessel_k0(4.0 * PI * t.sqrt())
}

/// t phi'(t), the u-derivative of phi(e^u).
fn phi_du(t: f64) -> f64 {
    if t > X_MAX {
        return 0.0;
    }
    let r = t.sqrt();
    let z = 4.0 * PI * r;
    4.0 * r * bessel_k0(z) - 16.0 * PI * t * bessel_k1(z)
}

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

fn gl4<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    GL4.iter().map(|&(x, w)| f(m + r * x) * w).sum::<Complex64>() * r
}

/// int_a^b f(u) du on panels of width at most 0.02.
fn integrate<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let n = ((b - a) / 0.02).ceil().max(1.0) as usize;
    let w = (b - a) / n as f64;
    (0..n).map(|i| gl4(f, a + i as f64 * w, a + (i + 1) as f64 * w)).sum()
}

fn integrand(s: Complex64, k: u32, u: f64) -> Complex64 {
    let x = u.exp();
    (s * u).exp() * phi(x) * u.powi(k as i32)
}

/// int_t^inf phi(x) x^s (log x)^k dx/x by direct quadrature.
pub fn upper_mellin(s: Complex64, t: f64, k: u32) -> Complex64 {
    integrate(&|u| integrand(s, k, u), t.ln(), X_MAX.ln())
}

/// int_a^b phi(t) t^s dt/t.
pub fn mellin_phi(s: Complex64, a: f64, b: f64) -> Complex64 {
    integrate(&|u| integrand(s, 0, u), a.ln(), b.min(X_MAX).ln())
}

fn binom(k: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// d^k/ds^k G_s(t) with G_s(t) = t^{-s} int_t^inf phi(x) x^s dx/x.
pub fn incomplete_mellin_g(s: Complex64, t: f64, k: u32) -> Result<Complex64, LError> {
    if !(t > 0.0) {
        return Err(LError::Domain(format!("G needs t > 0, got {t}")));
    }
    if k > 2 {
        return Err(LError::Domain(format!("derivative order {k} > 2")));
    }
    let lt = t.ln();
    let ts = (-s * lt).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=k {
        acc += binom(k, j) * (-lt).powi((k - j) as i32) * upper_mellin(s, t, j);
    }
    Ok(ts * acc)
}

/// int_t^inf phi(x) x^s (log x)^k dx/x tabulated on a grid in log x and read
/// back by cubic Hermite interpolation.
#[derive(Clone, Debug)]
pub struct MellinTable {
    pub s: Complex64,
    pub k: u32,
    u0: f64,
    du: f64,
    cum: Vec<Complex64>,
    dens: Vec<Complex64>,
}

const TABLE_STEP: f64 = 0.002;

impl MellinTable {
    pub fn new(s: Complex64, k: u32, t_min: f64) -> Self {
        let u_hi = X_MAX.ln();
        let u0 = t_min.ln().min(u_hi - 1.0) - TABLE_STEP;
        let n = ((u_hi - u0) / TABLE_STEP).ceil() as usize;
        let du = (u_hi - u0) / n as f64;
        let f = |u: f64| integrand(s, k, u);
        let dens: Vec<Complex64> = (0..=n).map(|i| f(u0 + i as f64 * du)).collect();
        let mut cum = vec![Complex64::new(0.0, 0.0); n + 1];
        for i in (0..n).rev() {
            cum[i] = cum[i + 1] + gl4(&f, u0 + i as f64 * du, u0 + (i + 1) as f64 * du);
        }
        MellinTable { s, k, u0, du, cum, dens }
    }

    pub fn t_min(&self) -> f64 {
        self.u0.exp()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let u = t.ln();
        let x = (u - self.u0) / self.du;
        assert!(x >= 0.0, "t = {t} below the table range");
        let i = x.floor() as usize;
        if i + 1 >= self.cum.len() {
            return Complex64::new(0.0, 0.0);
        }
        let r = x - i as f64;
        // C' = -density
        let (c0, c1) = (self.cum[i], self.cum[i + 1]);
        let (m0, m1) = (-self.dens[i] * self.du, -self.dens[i + 1] * self.du);
        let r2 = r * r;
        let r3 = r2 * r;
        c0 * (2.0 * r3 - 3.0 * r2 + 1.0) + m0 * (r3 - 2.0 * r2 + r) + c1 * (-2.0 * r3 + 3.0 * r2) + m1 * (r3 - r2)
    }
}

/// phi tabulated in log t, for the long sums defining Theta.
#[derive(Clone, Debug)]
pub struct PhiTable {
    u0: f64,
    du: f64,
    val: Vec<f64>,
    der: Vec<f64>,
}

impl PhiTable {
    pub fn new(t_min: f64) -> Self {
        let u_hi = X_MAX.ln();
        let u0 = t_min.ln().min(u_hi - 1.0) - TABLE_STEP;
        let n = ((u_hi - u0) / (TABLE_STEP / 2.0)).ceil() as usize;
        let du = (u_hi - u0) / n as f64;
        let us: Vec<f64> = (0..=n).map(|i| (u0 + i as f64 * du).exp()).collect();
        PhiTable { u0, du, val: us.iter().map(|&t| phi(t)).collect(), der: us.iter().map(|&t| phi_du(t)).collect() }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = (t.ln() - self.u0) / self.du;
        assert!(x >= 0.0, "t = {t} below the table range");
        let i = x.floor() as usize;
        if i + 1 >= self.val.len() {
            return 0.0;
        }
        let r = x - i as f64;
        let r2 = r * r;
        let r3 = r2 * r;
        self.val[i] * (2.0 * r3 - 3.0 * r2 + 1.0)
            + self.der[i] * self.du * (r3 - 2.0 * r2 + r)
            + self.val[i + 1] * (-2.0 * r3 + 3.0 * r2)
            + self.der[i + 1] * self.du * (r3 - r2)
    }
}
