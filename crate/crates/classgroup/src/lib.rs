//! Orders in imaginary quadratic fields, Picard groups through reduced forms,
//! Heegner points on X_0(N) as tau values, and Kolyvagin primes.

pub mod forms;

use ecarith::ap::ap_count;
use ecarith::numth::{factor, is_prime, kronecker, valuation};
use ecarith::CurveData;
pub use forms::{enumerate_reduced, ClassForm};
use mpkernel::BigComplex;
use rug::Float;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassError {
    #[error("-{0} is not a fundamental discriminant")]
    NotFundamental(u64),
    #[error("D = {0} is excluded (extra units)")]
    ExtraUnits(u64),
    #[error("invalid discriminant {0}")]
    BadDiscriminant(i64),
    #[error("{0} has no square root modulo 4N = {1}")]
    NoSquareRoot(i64, i64),
    #[error("conductor {0} is not prime to the level {1}")]
    LevelNotCoprime(u64, u64),
    #[error("prime {0} of the conductor has no Kolyvagin data")]
    MissingPrime(u64),
    #[error("class group is not cyclic")]
    NotCyclic,
    #[error("p = {0} divides N D")]
    BadP(u64),
}

/// Is d a fundamental discriminant?
pub fn is_fundamental(d: i64) -> bool {
    let squarefree = |n: u64| factor(n).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            (m.rem_euclid(4) == 2 || m.rem_euclid(4) == 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// The order of conductor c in Q(sqrt(-D)).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadOrder {
    pub big_d: u64,
    pub c: u64,
}

impl QuadOrder {
    pub fn new(big_d: u64, c: u64) -> Result<Self, ClassError> {
        if big_d == 3 || big_d == 4 {
            return Err(ClassError::ExtraUnits(big_d));
        }
        if !is_fundamental(-(big_d as i64)) {
            return Err(ClassError::NotFundamental(big_d));
        }
        Ok(QuadOrder { big_d, c })
    }

    /// d_c = -c^2 D.
    pub fn disc(&self) -> i64 {
        -((self.c * self.c * self.big_d) as i64)
    }
}

/// True iff every prime dividing N splits in Q(sqrt(-D)).
pub fn is_heegner_discriminant(e: &CurveData, big_d: u64) -> Result<bool, ClassError> {
    QuadOrder::new(big_d, 1)?;
    Ok(factor(e.conductor).iter().all(|&(q, _)| kronecker(-(big_d as i64), q) == 1))
}

/// Pic(O_c) as reduced forms with the full composition table.
#[derive(Clone, Debug, PartialEq)]
pub struct PicGroup {
    pub disc: i64,
    pub forms: Vec<ClassForm>,
    /// table[i][j] = index of forms[i] * forms[j]
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    /// A class of order h when the group is cyclic.
    pub generator: Option<usize>,
}

impl PicGroup {
    pub fn h(&self) -> usize {
        self.forms.len()
    }

    pub fn index_of(&self, f: &ClassForm) -> Option<usize> {
        let r = f.reduce();
        self.forms.iter().position(|g| *g == r)
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        (0..self.h()).find(|&j| self.table[i][j] == self.identity).expect("group")
    }

    pub fn pow(&self, i: usize, e: usize) -> usize {
        (0..e).fold(self.identity, |acc, _| self.mul(acc, i))
    }

    pub fn order(&self, i: usize) -> usize {
        let mut k = 1;
        let mut cur = i;
        while cur != self.identity {
            cur = self.mul(cur, i);
            k += 1;
        }
        k
    }

    /// Discrete logarithms with respect to the generator.
    pub fn logs(&self) -> Result<Vec<usize>, ClassError> {
        let g = self.generator.ok_or(ClassError::NotCyclic)?;
        let mut out = vec![0; self.h()];
        let mut cur = self.identity;
        for k in 0..self.h() {
            out[cur] = k;
            cur = self.mul(cur, g);
        }
        Ok(out)
    }
}

/// Enumerates Pic(O) for discriminant d and builds the composition table.
pub fn reduced_forms(d: i64) -> Result<PicGroup, ClassError> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err(ClassError::BadDiscriminant(d));
    }
    let forms = enumerate_reduced(d);
    let pos: HashMap<ClassForm, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let table: Vec<Vec<usize>> = forms.iter().map(|f| forms.iter().map(|g| pos[&f.compose(g)]).collect()).collect();
    let identity = pos[&ClassForm::principal(d)];
    let mut pic = PicGroup { disc: d, forms, table, identity, generator: None };
    let h = pic.h();
    pic.generator = (0..h).find(|&i| pic.order(i) == h);
    Ok(pic)
}

/// A Heegner point of level N attached to one class of Pic(O_c).
#[derive(Clone, Debug, PartialEq)]
pub struct HeegnerTau {
    /// [A, b, C] with N | A and b = beta mod 2N.
    pub form: ClassForm,
    pub class_index: usize,
    pub beta: i64,
    pub tau: BigComplex,
}

impl HeegnerTau {
    pub fn im(&self) -> f64 {
        self.tau.im.to_f64()
    }
}

/// The smallest nonnegative b with b^2 = d mod 4N.
pub fn beta_root(d: i64, n: u64) -> Result<i64, ClassError> {
    let m = 4 * n as i64;
    (0..2 * n as i64)
        .find(|b| (b * b - d).rem_euclid(m) == 0)
        .ok_or(ClassError::NoSquareRoot(d, m))
}

/// One tau = (-b + sqrt(d))/(2A) per class, in class order.
pub fn heegner_taus(pic: &PicGroup, n: u64, prec: u32) -> Result<Vec<HeegnerTau>, ClassError> {
    let d = pic.disc;
    if ecarith::numth::gcd(d.unsigned_abs(), n) != 1 {
        return Err(ClassError::LevelNotCoprime(d.unsigned_abs(), n));
    }
    let beta = beta_root(d, n)?;
    let n = n as i64;
    let h = pic.h();
    let mut found: Vec<Option<ClassForm>> = vec![None; h];
    let mut count = 0;
    let mut a = 1i64;
    while count < h {
        let big_a = n * a;
        // b = beta mod 2N within (-A, A]
        let mut b = beta - (beta + big_a).div_euclid(2 * n) * 2 * n;
        while b <= -big_a {
            b += 2 * n;
        }
        while b <= big_a {
            if let Some(f) = ClassForm::from_ab(big_a, b, d) {
                if f.is_primitive() {
                    let i = pic.index_of(&f).expect("form of the right discriminant");
                    if found[i].is_none() {
                        found[i] = Some(f);
                        count += 1;
                    }
                }
            }
            b += 2 * n;
        }
        a += 1;
    }
    let sq = Float::with_val(prec, -d).sqrt();
    Ok(found
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let f = f.unwrap();
            let den = Float::with_val(prec, 2 * f.a);
            let tau = BigComplex::new(Float::with_val(prec, -f.b) / &den, Float::with_val(prec, &sq / &den));
            HeegnerTau { form: f, class_index: i, beta, tau }
        })
        .collect())
}

/// Action of Pic(O_c) on the Heegner points: class a sends the point of class b to
/// the point of class a*b.
#[derive(Clone, Debug, PartialEq)]
pub struct GaloisAction {
    pub perms: Vec<Vec<usize>>,
}

impl GaloisAction {
    pub fn apply(&self, a: usize, b: usize) -> usize {
        self.perms[a][b]
    }
}

pub fn galois_dictionary(pic: &PicGroup) -> GaloisAction {
    GaloisAction { perms: pic.table.clone() }
}

/// ord_p(gcd(a_l, l + 1)) bound, with infinity for the empty product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MBound {
    Finite(u32),
    Infinity,
}

impl fmt::Display for MBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MBound::Finite(m) => write!(f, "{m}"),
            MBound::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KolyvaginPrime {
    pub ell: u64,
    pub a_ell: i64,
    pub m_ell: u32,
}

/// All Kolyvagin primes l <= bound for (E, K, p).
pub fn kolyvagin_primes(e: &CurveData, big_d: u64, p: u64, bound: u64) -> Result<Vec<KolyvaginPrime>, ClassError> {
    if e.conductor.is_multiple_of(p) || big_d.is_multiple_of(p) {
        return Err(ClassError::BadP(p));
    }
    let mut out = vec![];
    for ell in 2..=bound {
        if !is_prime(ell) || e.conductor.is_multiple_of(ell) || big_d.is_multiple_of(ell) || ell == p {
            continue;
        }
        if kronecker(-(big_d as i64), ell) != -1 {
            continue;
        }
        let a = ap_count(e, ell).expect("good prime");
        let g = ecarith::numth::gcd(a.unsigned_abs(), ell + 1);
        let m = valuation(g as i64, p);
        if m >= 1 {
            out.push(KolyvaginPrime { ell, a_ell: a, m_ell: m });
        }
    }
    Ok(out)
}

/// M(c) = min over l | c of M(l); infinity for c = 1.
pub fn m_of_c(c: u64, primes: &[KolyvaginPrime]) -> Result<MBound, ClassError> {
    let mut best = MBound::Infinity;
    for (l, _) in factor(c) {
        let k = primes.iter().find(|k| k.ell == l).ok_or(ClassError::MissingPrime(l))?;
        best = best.min(MBound::Finite(k.m_ell));
    }
    Ok(best)
}

/// Ingested per-(E, p) flags for the surjectivity of the mod p representation.
#[derive(Clone, Debug, Default)]
pub struct Attestations {
    entries: HashMap<(String, u64), bool>,
}

const ATTESTED: &str = include_str!("../data/surjectivity.txt");

impl Attestations {
    pub fn builtin() -> Self {
        Attestations::parse(ATTESTED)
    }

    /// Lines `label p yes|no`; `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        let mut entries = HashMap::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() == 3 {
                if let Ok(p) = parts[1].parse() {
                    entries.insert((parts[0].to_ascii_uppercase(), p), parts[2] == "yes");
                }
            }
        }
        Attestations { entries }
    }

    pub fn surjective(&self, label: &str, p: u64) -> Option<bool> {
        self.entries.get(&(label.to_ascii_uppercase(), p)).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_discriminants() {
        assert!(is_fundamental(-7));
        assert!(is_fundamental(-43));
        assert!(is_fundamental(-8));
        assert!(!is_fundamental(-28 * 4));
        assert!(!is_fundamental(-175));
        assert!(QuadOrder::new(3, 1).is_err());
        assert_eq!(QuadOrder::new(7, 5).unwrap().disc(), -175);
    }
}
