//! Kolyvagin classes from derived Heegner points: derivative operators, exact
//! p^m-divisibility verdicts with replayable certificates, and the Sha criterion.

pub mod certificate;
pub mod cyclo;
pub mod divisibility;
pub mod operator;

pub use certificate::{epsilon_of_c, f_of_c, Assumptions, CertKind, Certificate};
pub use classgroup::MBound;
pub use cyclo::{char_sum, char_sum_direct, CycElem, Cyclotomic};
pub use divisibility::{divisible_by_p, DivisibilityOptions, DivisionProblem, Place, Probe, Verdict};
pub use operator::{derived_point, formal_identity_holds, operator_identity_check, DerivativeOperator, DerivedPoint};

use ecarith::numth::{is_prime, kronecker};
use ecarith::{ap_count, CurveData, Point};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KolyError {
    #[error("ring class field: {0}")]
    Ring(#[from] ringclass::RingError),
    #[error("arithmetic: {0}")]
    Arith(#[from] ecarith::ArithError),
    #[error("class group: {0}")]
    Class(#[from] classgroup::ClassError),
    #[error("sigma_{ell} must have order {}, found {found:?}", ell + 1)]
    BadGeneratorOrder { ell: u64, found: Option<usize> },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("p = {0} must be an odd prime")]
    BadP(u64),
    #[error("m = {m} exceeds M(c) = {bound}")]
    OutOfRange { m: u32, bound: MBound },
    #[error("P_c is divisible by p^m, so the class is trivial")]
    Divisible,
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("not a root of unity of the required order")]
    NotRootOfUnity,
    #[error("certificate: {0}")]
    Certificate(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}

/// Certificate that kappa_{c,m} != 0, i.e. P_c is not in p^m E(K[c]).
pub fn class_nontrivial(
    e: &CurveData,
    dp: &DerivedPoint,
    p: u64,
    m: u32,
    m_bound: MBound,
    surjective: Option<bool>,
    opts: &DivisibilityOptions,
) -> Result<Certificate, KolyError> {
    if let MBound::Finite(mc) = m_bound {
        if m > mc {
            return Err(KolyError::OutOfRange { m, bound: m_bound });
        }
    }
    let verdict = divisible_by_p(dp, p, m, opts)?;
    let (witness, g_mod, transcript) = match verdict {
        Verdict::NonDivisible { witness, g_mod, transcript } => (witness, g_mod, transcript),
        Verdict::Divisible { .. } => return Err(KolyError::Divisible),
        Verdict::Inconclusive { reason, .. } => return Err(KolyError::Inconclusive(reason)),
    };
    let Point::Affine(x, _) = &dp.short else { unreachable!("verdict needs an affine point") };
    let prob = DivisionProblem::from_point(dp, p.pow(m))?;
    let note = (dp.c == 1).then(|| "c = 1: P_1 = y_K is non-torsion, so m_0 is finite".to_string());
    Ok(Certificate {
        kind: CertKind::KolyvaginClass,
        label: e.label.clone(),
        big_d: dp.big_d,
        c: dp.c,
        p,
        m,
        m_bound,
        a: dp.model.a.clone(),
        b: dp.model.b.clone(),
        field: dp.field.clone(),
        x: x.clone(),
        g_hash: prob.g_hash(),
        witness,
        g_mod,
        transcript,
        f_c: f_of_c(dp.c),
        epsilon: e.epsilon(),
        epsilon_c: epsilon_of_c(e.epsilon(), dp.c),
        assumptions: Assumptions { surjective, ..Default::default() },
        provenance: dp.provenance.clone(),
        note,
    })
}

/// Hypotheses of the Sha criterion that are not read off the class certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShaContext {
    pub rank_one: bool,
    pub torsion_p_trivial: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Rejection {
    #[error("Selmer hypothesis not attested")]
    Selmer,
    #[error("non-divisibility not certified: {0}")]
    NotCertified(String),
    #[error("f_c = {0} is even")]
    Parity(u32),
    #[error("epsilon = {0}, the argument needs epsilon = 1")]
    Epsilon(i32),
    #[error("rank of E(K) not attested to be one")]
    RankOne,
    #[error("E(K)[p] not shown to vanish")]
    Torsion,
}

impl Rejection {
    pub fn name(&self) -> &'static str {
        match self {
            Rejection::Selmer => "selmer",
            Rejection::NotCertified(_) => "certificate",
            Rejection::Parity(_) => "parity",
            Rejection::Epsilon(_) => "epsilon",
            Rejection::RankOne => "rank",
            Rejection::Torsion => "torsion",
        }
    }
}

/// Promotes a class certificate to kappa'_{c,m} != 0 in Sha(E/K)[p^m].
pub fn sha_criterion(cert: &Certificate, selmer_attested: bool, f_c: u32, epsilon: i32, ctx: &ShaContext) -> Result<Certificate, Rejection> {
    if !selmer_attested {
        return Err(Rejection::Selmer);
    }
    if cert.kind != CertKind::KolyvaginClass {
        return Err(Rejection::NotCertified("expected a class certificate".into()));
    }
    cert.replay().map_err(|e| Rejection::NotCertified(e.to_string()))?;
    if f_c.is_multiple_of(2) {
        return Err(Rejection::Parity(f_c));
    }
    if f_c != cert.f_c {
        return Err(Rejection::NotCertified(format!("f_c = {f_c} disagrees with the certificate")));
    }
    if epsilon != 1 {
        return Err(Rejection::Epsilon(epsilon));
    }
    if !ctx.rank_one {
        return Err(Rejection::RankOne);
    }
    if !ctx.torsion_p_trivial {
        return Err(Rejection::Torsion);
    }
    let mut out = cert.clone();
    out.kind = CertKind::ShaElement;
    out.assumptions.selmer_attested = Some(true);
    out.assumptions.rank_one = Some(true);
    out.assumptions.torsion_p_trivial = Some(true);
    Ok(out)
}

/// E(K)[p] = 0 if p misses #E(F_q) for a split good prime q != p: torsion prime to q
/// injects into E(F_q) through the degree-1 prime of K above q.
pub fn torsion_p_trivial(e: &CurveData, big_d: u64, p: u64, max_q: u64) -> Option<u64> {
    (5..max_q).find(|&q| {
        is_prime(q)
            && q != p
            && !e.is_bad(q)
            && !big_d.is_multiple_of(q)
            && kronecker(-(big_d as i64), q) == 1
            && ap_count(e, q).map(|a| (q as i64 + 1 - a) % p as i64 != 0).unwrap_or(false)
    })
}

const RANKS: &str = include_str!("../data/rank.txt");

/// Attested ranks of E(K), lines `label D rank`.
#[derive(Clone, Debug, Default)]
pub struct RankAttestations {
    entries: HashMap<(String, u64), u32>,
}

impl RankAttestations {
    pub fn builtin() -> Self {
        Self::parse(RANKS)
    }

    pub fn parse(text: &str) -> Self {
        let mut entries = HashMap::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            let parts: Vec<&str> = line.split_whitespace().collect();
            if let [label, d, r] = parts[..] {
                if let (Ok(d), Ok(r)) = (d.parse(), r.parse()) {
                    entries.insert((label.to_ascii_uppercase(), d), r);
                }
            }
        }
        RankAttestations { entries }
    }

    pub fn rank(&self, label: &str, big_d: u64) -> Option<u32> {
        self.entries.get(&(label.to_ascii_uppercase(), big_d)).copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MFunctionEntry {
    pub c: u64,
    /// Largest e probed with P_c in p^e E(K[c]); Infinity when every probe up to
    /// M(c) + 1 was divisible.
    pub m_prime: MBound,
    pub m_of_c: MBound,
    /// (e, verdict kind) per probe.
    pub probes: Vec<(u32, &'static str)>,
    pub inconclusive: Option<String>,
}

/// Largest feasible exponent: g has degree p^{2e}.
fn max_exponent(p: u64) -> u32 {
    let mut e = 1;
    while p.pow(e + 1) <= 9 {
        e += 1;
    }
    e
}

/// m'(c) and m(c); m'(c) = 0 is allowed when P_c is not even divisible by p.
pub fn m_function(dp: &DerivedPoint, p: u64, m_bound: MBound, opts: &DivisibilityOptions) -> Result<MFunctionEntry, KolyError> {
    let cap = match m_bound {
        MBound::Finite(mc) => mc + 1,
        MBound::Infinity => max_exponent(p),
    };
    let mut probes = vec![];
    let entry = |m_prime, m_of_c, probes, inconclusive| MFunctionEntry { c: dp.c, m_prime, m_of_c, probes, inconclusive };
    for e in 1..=cap {
        if e > max_exponent(p) {
            return Ok(entry(MBound::Infinity, MBound::Infinity, probes, Some(format!("p^{e} is beyond the feasible division degree"))));
        }
        let v = divisible_by_p(dp, p, e, opts)?;
        probes.push((e, v.kind()));
        match v {
            Verdict::NonDivisible { .. } => {
                let mp = MBound::Finite(e - 1);
                let mc = if mp <= m_bound { mp } else { MBound::Infinity };
                return Ok(entry(mp, mc, probes, None));
            }
            Verdict::Divisible { .. } => {}
            Verdict::Inconclusive { reason, .. } => return Ok(entry(MBound::Infinity, MBound::Infinity, probes, Some(reason))),
        }
    }
    if m_bound == MBound::Infinity {
        return Ok(entry(MBound::Infinity, MBound::Infinity, probes, Some("divisible at every feasible exponent".into())));
    }
    Ok(entry(MBound::Infinity, MBound::Infinity, probes, None))
}
