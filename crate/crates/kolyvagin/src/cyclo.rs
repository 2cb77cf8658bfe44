//! Q(zeta_n) as Q[x]/(Phi_n), enough to evaluate the character sums
//! sum_{i=1..l} i chi^i exactly.

use crate::KolyError;
use ecarith::ring::{Rationals, Ring};
use ecarith::{Poly, PolyRing};
use rug::Rational;

#[derive(Clone, Debug)]
pub struct Cyclotomic {
    pub n: u64,
    pub phi: Poly<Rational>,
    ring: PolyRing<Rationals>,
}

pub type CycElem = Poly<Rational>;

/// Phi_n by dividing x^n - 1 by Phi_d for the proper divisors d.
pub fn cyclotomic_poly(n: u64) -> Poly<Rational> {
    let ring = PolyRing::new(Rationals);
    let mut p = ring.sub(&ring.monomial(Rational::from(1), n as usize), &ring.one());
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = ring.divrem(&p, &cyclotomic_poly(d)).expect("monic divisor").0;
        }
    }
    p
}

impl Cyclotomic {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        Cyclotomic { n, phi: cyclotomic_poly(n), ring: PolyRing::new(Rationals) }
    }

    pub fn reduce(&self, a: CycElem) -> CycElem {
        self.ring.rem(&a, &self.phi).expect("monic modulus")
    }

    /// zeta^k for the class of x.
    pub fn zeta_pow(&self, k: u64) -> CycElem {
        self.reduce(self.ring.monomial(Rational::from(1), (k % self.n) as usize))
    }

    pub fn from_i64(&self, n: i64) -> CycElem {
        self.ring.from_i64(n)
    }

    pub fn add(&self, a: &CycElem, b: &CycElem) -> CycElem {
        self.ring.add(a, b)
    }

    pub fn sub(&self, a: &CycElem, b: &CycElem) -> CycElem {
        self.ring.sub(a, b)
    }

    pub fn mul(&self, a: &CycElem, b: &CycElem) -> CycElem {
        self.reduce(self.ring.mul(a, b))
    }

    pub fn pow(&self, a: &CycElem, e: u64) -> CycElem {
        let mut acc = self.ring.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn inv(&self, a: &CycElem) -> Result<CycElem, KolyError> {
        let (g, s, _) = self.ring.xgcd(a, &self.phi)?;
        if g.len() != 1 {
            return Err(KolyError::NotRootOfUnity);
        }
        Ok(self.reduce(s))
    }

    pub fn is_one(&self, a: &CycElem) -> bool {
        *a == self.ring.one()
    }

    pub fn format(&self, a: &CycElem) -> String {
        self.ring.to_string_with(a, "z")
    }
}

fn check_chi(ell: u64, chi: &CycElem, cyc: &Cyclotomic) -> Result<(), KolyError> {
    if !cyc.is_one(&cyc.pow(chi, ell + 1)) {
        return Err(KolyError::NotRootOfUnity);
    }
    Ok(())
}

/// sum_{i=1..l} i chi^i in closed form: (l+1)/(chi-1), or l(l+1)/2 at chi = 1.
pub fn char_sum(ell: u64, chi: &CycElem, cyc: &Cyclotomic) -> Result<CycElem, KolyError> {
    check_chi(ell, chi, cyc)?;
    if cyc.is_one(chi) {
        return Ok(cyc.from_i64((ell * (ell + 1) / 2) as i64));
    }
    let den = cyc.inv(&cyc.sub(chi, &cyc.from_i64(1)))?;
    Ok(cyc.mul(&cyc.from_i64(ell as i64 + 1), &den))
}

/// The same sum term by term.
pub fn char_sum_direct(ell: u64, chi: &CycElem, cyc: &Cyclotomic) -> Result<CycElem, KolyError> {
    check_chi(ell, chi, cyc)?;
    let mut acc = cyc.from_i64(0);
    let mut pw = cyc.from_i64(1);
    for i in 1..=ell {
        pw = cyc.mul(&pw, chi);
        acc = cyc.add(&acc, &cyc.mul(&cyc.from_i64(i as i64), &pw));
    }
    Ok(acc)
}
