use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Complex number as a pair of MPFR floats sharing one precision.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        BigComplex::from_f64(prec, 1.0, 0.0)
    }

    pub fn i(prec: u32) -> Self {
        BigComplex::from_f64(prec, 0.0, 1.0)
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        BigComplex::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn from_real(x: Float) -> Self {
        let prec = x.prec();
        BigComplex::new(x, Float::new(prec))
    }

    pub fn from_i64(prec: u32, n: i64) -> Self {
        BigComplex::new(Float::with_val(prec, n), Float::new(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        BigComplex::new(self.re.clone(), Float::with_val(self.im.prec(), -&self.im))
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.im.atan2_ref(&self.re))
    }

    pub fn mul_real(&self, r: &Float) -> Self {
        let p = self.prec().max(r.prec());
        BigComplex::new(Float::with_val(p, &self.re * r), Float::with_val(p, &self.im * r))
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        let p = self.prec();
        BigComplex::new(Float::with_val(p, &self.re * n), Float::with_val(p, &self.im * n))
    }

    pub fn div_i64(&self, n: i64) -> Self {
        let p = self.prec();
        BigComplex::new(Float::with_val(p, &self.re / n), Float::with_val(p, &self.im / n))
    }

    pub fn mul_i(&self) -> Self {
        BigComplex::new(Float::with_val(self.im.prec(), -&self.im), self.re.clone())
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        BigComplex::new(Float::with_val(p, &self.re / &n), Float::with_val(p, -(&self.im / n)))
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = Float::with_val(p, &self.im).sin_cos(Float::new(p));
        BigComplex::new(Float::with_val(p, &m * c), m * s)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        BigComplex::new(Float::with_val(p, self.abs().ln()), Float::with_val(p, self.arg()))
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return BigComplex::zero(p);
        }
        let r = self.abs();
        // sqrt((r + |re|)/2) is computed without cancellation
        let t = Float::with_val(p, (Float::with_val(p, &r + Float::with_val(p, self.re.abs_ref()))) / 2u32).sqrt();
        let half = Float::with_val(p, &self.im / (Float::with_val(p, &t * 2u32)));
        if self.re >= 0 {
            BigComplex::new(t, half)
        } else if self.im >= 0 {
            BigComplex::new(half.abs(), t)
        } else {
            BigComplex::new(half.abs(), -t)
        }
    }

    pub fn pow_u64(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = BigComplex::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Real power of a complex number via the principal branch.
    pub fn pow_real(&self, s: &Float) -> Self {
        let l = self.ln();
        l.mul_real(s).exp()
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// e^{2 pi i z}.
    pub fn e2pii(&self) -> Self {
        let p = self.prec();
        let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
        self.mul_real(&two_pi).mul_i().exp()
    }

    pub fn dist(&self, o: &Self) -> Float {
        (self - o).abs()
    }

    pub fn powi(&self, e: i64) -> Self {
        if e >= 0 {
            self.pow_u64(e as u64)
        } else {
            self.pow_u64(e.unsigned_abs()).inv()
        }
    }
}

/// Digits-to-bits conversion with a small safety margin.
pub fn digits_to_bits(digits: u32) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// 2^{-bits} as a float.
pub fn eps(prec: u32, bits: i32) -> Float {
    Float::with_val(prec, 2).pow(-bits)
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(20);
        write!(f, "{:.*e} + {:.*e}i", d, self.re, d, self.im)
    }
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        BigComplex::new(Float::with_val(p, &self.re + &o.re), Float::with_val(p, &self.im + &o.im))
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        BigComplex::new(Float::with_val(p, &self.re - &o.re), Float::with_val(p, &self.im - &o.im))
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        let ac = Float::with_val(p, &self.re * &o.re);
        let bd = Float::with_val(p, &self.im * &o.im);
        let ad = Float::with_val(p, &self.re * &o.im);
        let bc = Float::with_val(p, &self.im * &o.re);
        BigComplex::new(ac - bd, ad + bc)
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn div(self, o: &BigComplex) -> BigComplex {
        let n = o.norm_sqr();
        let num = self * &o.conj();
        let p = num.prec();
        BigComplex::new(Float::with_val(p, &num.re / &n), Float::with_val(p, &num.im / &n))
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(Float::with_val(self.re.prec(), -&self.re), Float::with_val(self.im.prec(), -&self.im))
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: BigComplex) -> BigComplex {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: &BigComplex) -> BigComplex {
                (&self).$m(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_squares_back() {
        for (a, b) in [(3.0, 4.0), (-3.0, 4.0), (-3.0, -4.0), (0.0, -2.0), (-5.0, 0.0)] {
            let z = BigComplex::from_f64(200, a, b);
            let r = z.sqrt();
            assert!(r.re >= 0);
            assert!(r.square().dist(&z) < 1e-50);
        }
    }

    #[test]
    fn exp_of_i_pi_is_minus_one() {
        let z = BigComplex::new(Float::new(128), pi(128)).exp();
        assert!(z.dist(&BigComplex::from_f64(128, -1.0, 0.0)) < 1e-35);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = BigComplex::from_f64(150, 1.25, -7.5);
        let b = BigComplex::from_f64(150, -0.5, 2.0);
        assert!(((&a * &b) / &b).dist(&a) < 1e-40);
        assert!((&b.inv() * &b).dist(&BigComplex::one(150)) < 1e-40);
    }

    #[test]
    fn powers_and_logs() {
        let a = BigComplex::from_f64(120, 0.3, 1.1);
        assert!(a.powi(-3).dist(&(&a * &a * a.clone()).inv()) < 1e-30);
        let s = Float::with_val(120, 2);
        assert!(a.pow_real(&s).dist(&a.square()) < 1e-30);
    }
}
