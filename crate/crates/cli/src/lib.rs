//! Orchestration behind the `hkc` binary: job validation, the Heegner point
//! cache, and the text reports and certificates each subcommand emits.
//!
//! Every report is a pure function of the job and the exact data it is built
//! from, so a cache hit and a fresh computation print the same bytes. Progress
//! and timing go to the diagnostic stream only.

use classgroup::{is_fundamental, is_heegner_discriminant, kolyvagin_primes, m_of_c, Attestations, MBound};
use ecarith::numth::{factor, gcd, is_prime, kronecker};
use ecarith::{CurveData, CurveDb};
use kolyvagin::{
    class_nontrivial, derived_point, f_of_c, sha_criterion, torsion_p_trivial, Certificate, DerivativeOperator, DivisibilityOptions, KolyError,
    RankAttestations, Rejection, ShaContext,
};
use lanalytic::{convexity_height_bound, precision_planner, silverman_bounds, zhang_height_bound, LError, CONVEXITY_CONSTANT};
use modparam::heegner::heegner_setup;
use modparam::{heegner_point, load_record, record_to_text, save_record_atomic, HeegnerOptions, HeegnerRecord};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Precision doublings allowed when the planned precision falls short.
const RETRIES: u32 = 4;
/// Exponent used with the convexity fallback.
const CONVEXITY_EPS: f64 = 0.1;
/// Search bound for the prime proving E(K)[p] = 0.
const TORSION_SEARCH: u64 = 500;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error ({reason}): {detail}")]
    Validation { reason: &'static str, detail: String },
    #[error("rejected ({reason}): {detail}")]
    Rejected { reason: &'static str, detail: String },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Inconclusive(_) => 2,
            CliError::Validation { .. } | CliError::Rejected { .. } => 3,
            CliError::Internal(_) => 4,
        }
    }
}

fn invalid(reason: &'static str, detail: impl Into<String>) -> CliError {
    CliError::Validation { reason, detail: detail.into() }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

/// Knobs shared by every subcommand.
#[derive(Clone, Debug)]
pub struct Settings {
    pub precision_digits: Option<u32>,
    pub terms: Option<usize>,
    pub place_budget: usize,
    pub cache_dir: PathBuf,
    pub force: bool,
}

impl Settings {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        Settings { precision_digits: None, terms: None, place_budget: 64, cache_dir: cache_dir.into(), force: false }
    }
}

/// A subcommand's output: the report for stdout and, when one was issued, the
/// certificate text with the file it was written to.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: String,
    pub certificate: Option<(PathBuf, String)>,
}

/// Validated parameters of one job.
#[derive(Clone, Debug)]
pub struct JobSpec {
    pub curve: CurveData,
    pub big_d: u64,
    pub c: u64,
    pub p: Option<u64>,
    pub m: Option<u32>,
    pub m_bound: Option<MBound>,
}

pub fn curve(label: &str) -> Result<CurveData, CliError> {
    CurveDb::builtin().get(label).cloned().map_err(|e| invalid("unknown-curve", e.to_string()))
}

pub fn validate_disc(e: &CurveData, big_d: u64) -> Result<(), CliError> {
    if big_d == 3 || big_d == 4 {
        return Err(invalid("D-in-3-4", format!("D = {big_d} has extra units")));
    }
    if big_d == 0 || !is_fundamental(-(big_d as i64)) {
        return Err(invalid("non-fundamental-D", format!("-{big_d} is not a fundamental discriminant")));
    }
    match is_heegner_discriminant(e, big_d) {
        Ok(true) => Ok(()),
        Ok(false) => Err(invalid("non-heegner-D", format!("some prime of N = {} does not split in Q(sqrt(-{big_d}))", e.conductor))),
        Err(err) => Err(invalid("non-heegner-D", err.to_string())),
    }
}

pub fn validate_c(e: &CurveData, big_d: u64, c: u64) -> Result<(), CliError> {
    if c == 0 {
        return Err(invalid("bad-c", "c must be positive"));
    }
    if gcd(c, e.conductor * big_d) != 1 {
        return Err(invalid("c-not-coprime", format!("c = {c} is not prime to N D = {}", e.conductor * big_d)));
    }
    Ok(())
}

pub fn validate_p(e: &CurveData, big_d: u64, p: u64) -> Result<(), CliError> {
    if p < 3 || !is_prime(p) {
        return Err(invalid("p-not-odd-prime", format!("p = {p} is not an odd prime")));
    }
    if e.conductor.is_multiple_of(p) {
        return Err(invalid("p-divides-N", format!("p = {p} divides N = {}", e.conductor)));
    }
    if big_d.is_multiple_of(p) {
        return Err(invalid("p-divides-D", format!("p = {p} divides D = {big_d}")));
    }
    Ok(())
}

/// Every prime of c must be a Kolyvagin prime; returns M(c).
pub fn validate_ells(e: &CurveData, big_d: u64, p: u64, c: u64) -> Result<MBound, CliError> {
    let primes = kolyvagin_primes(e, big_d, p, c.max(2)).map_err(|err| invalid("p-divides-N", err.to_string()))?;
    for (l, k) in factor(c) {
        match kronecker(-(big_d as i64), l) {
            1 => return Err(invalid("split-ell", format!("l = {l} splits in Q(sqrt(-{big_d}))"))),
            0 => return Err(invalid("ramified-ell", format!("l = {l} ramifies in Q(sqrt(-{big_d}))"))),
            _ => {}
        }
        if k > 1 {
            return Err(invalid("non-squarefree-c", format!("l = {l} divides c = {c} more than once")));
        }
        if !primes.iter().any(|kp| kp.ell == l) {
            return Err(invalid("not-kolyvagin-ell", format!("p = {p} does not divide gcd(a_l, l + 1) for l = {l}")));
        }
    }
    m_of_c(c, &primes).map_err(|err| invalid("not-kolyvagin-ell", err.to_string()))
}

pub fn heegner_job(label: &str, big_d: u64, c: u64) -> Result<JobSpec, CliError> {
    let e = curve(label)?;
    validate_disc(&e, big_d)?;
    validate_c(&e, big_d, c)?;
    Ok(JobSpec { curve: e, big_d, c, p: None, m: None, m_bound: None })
}

pub fn kolyvagin_job(label: &str, big_d: u64, c: u64, p: u64, m: u32) -> Result<JobSpec, CliError> {
    let mut job = heegner_job(label, big_d, c)?;
    validate_p(&job.curve, big_d, p)?;
    let bound = validate_ells(&job.curve, big_d, p, c)?;
    if m == 0 {
        return Err(invalid("m-out-of-range", "m must be at least 1"));
    }
    if let MBound::Finite(mc) = bound {
        if m > mc {
            return Err(invalid("m-out-of-range", format!("m = {m} exceeds M(c) = {mc}")));
        }
    }
    job.p = Some(p);
    job.m = Some(m);
    job.m_bound = Some(bound);
    Ok(job)
}

/// Height bound and the precision it implies for recognizing y_c.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub source: &'static str,
    pub hhat_bound: f64,
    pub hlog_bound: f64,
    pub digits: u32,
    pub terms: usize,
}

pub fn plan(job: &JobSpec) -> Result<Plan, CliError> {
    let e = &job.curve;
    let (pic, taus) = heegner_setup(e, job.big_d, job.c).map_err(internal)?;
    let im_min = taus.iter().map(|t| t.im()).fold(f64::INFINITY, f64::min);
    let (source, hhat, hlog) = match zhang_height_bound(e, job.big_d, job.c) {
        Ok(b) => ("zhang", b.hhat_bound, b.hlog_bound),
        Err(err @ LError::FunctionalEquation { .. }) => return Err(internal(err)),
        Err(_) => {
            let h_d = classgroup::reduced_forms(-(job.big_d as i64)).map_err(internal)?.h();
            let hhat = convexity_height_bound(h_d, job.big_d, job.c, CONVEXITY_CONSTANT, CONVEXITY_EPS);
            ("convexity", hhat, hhat - silverman_bounds(e).0)
        }
    };
    let (digits, terms) = precision_planner(hlog, pic.h(), im_min);
    Ok(Plan { source, hhat_bound: hhat, hlog_bound: hlog, digits, terms })
}

pub fn cache_path(settings: &Settings, job: &JobSpec, beta: i64) -> PathBuf {
    settings.cache_dir.join(format!("{}-D{}-c{}-beta{}-v{}.rec", job.curve.label, job.big_d, job.c, beta, CODE_VERSION))
}

/// y_c from the cache, or computed at planned precision and cached.
pub fn heegner_record(job: &JobSpec, settings: &Settings, log: &mut dyn Write) -> Result<HeegnerRecord, CliError> {
    let e = &job.curve;
    let (_, taus) = heegner_setup(e, job.big_d, job.c).map_err(internal)?;
    let path = cache_path(settings, job, taus[0].beta);
    if path.exists() && !settings.force {
        let _ = writeln!(log, "cache hit: {}", path.display());
        return load_record(e, &path).map_err(internal);
    }
    let digits = settings.precision_digits;
    let (digits, terms) = match (digits, settings.terms) {
        (Some(d), t) => (d, t),
        (None, t) => {
            let p = plan(job)?;
            let _ = writeln!(log, "plan ({}): h^ <= {:.6}, h <= {:.6}, {} digits, {} terms", p.source, p.hhat_bound, p.hlog_bound, p.digits, p.terms);
            (p.digits, Some(t.unwrap_or(p.terms)))
        }
    };
    let rec = heegner_point(e, job.big_d, job.c, &HeegnerOptions { digits, retries: RETRIES, terms }).map_err(|err| match err {
        modparam::ParamError::RetriesExhausted(_) => CliError::Inconclusive(err.to_string()),
        other => internal(other),
    })?;
    std::fs::create_dir_all(&settings.cache_dir).map_err(internal)?;
    save_record_atomic(&rec, &path).map_err(internal)?;
    let _ = writeln!(log, "cached: {}", path.display());
    Ok(rec)
}

fn header(out: &mut String, title: &str, job: &JobSpec) {
    let e = &job.curve;
    let a: Vec<String> = e.a.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(out, "# hkc {title}");
    let _ = writeln!(out, "curve={} N={} model=[{}]", e.label, e.conductor, a.join(","));
    let _ = write!(out, "D={} c={}", job.big_d, job.c);
    if let (Some(p), Some(m)) = (job.p, job.m) {
        let _ = write!(out, " p={p} m={m}");
    }
    if let Some(b) = job.m_bound {
        let _ = write!(out, " M(c)={b}");
    }
    out.push('\n');
}

fn record_block(out: &mut String, rec: &HeegnerRecord) {
    let _ = writeln!(out, "[heegner point y_c; alpha = x(y_c), F = minimal polynomial of alpha over K]");
    out.push_str(&record_to_text(rec));
}

pub fn cmd_heegner(label: &str, big_d: u64, c: u64, settings: &Settings, log: &mut dyn Write) -> Result<Outcome, CliError> {
    let job = heegner_job(label, big_d, c)?;
    let rec = heegner_record(&job, settings, log)?;
    let mut out = String::new();
    header(&mut out, "heegner report", &job);
    let _ = writeln!(out, "h(O_c)={}", rec.h());
    record_block(&mut out, &rec);
    Ok(Outcome { report: out, certificate: None })
}

fn cert_path(settings: &Settings, cert: &Certificate) -> PathBuf {
    settings.cache_dir.join("certificates").join(format!("{}-{}-D{}-c{}-p{}-m{}.cert", cert.kind.as_str(), cert.label, cert.big_d, cert.c, cert.p, cert.m))
}

fn write_cert(settings: &Settings, out: Option<&Path>, cert: &Certificate) -> Result<(PathBuf, String), CliError> {
    let text = cert.to_text();
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| cert_path(settings, cert));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(internal)?;
    }
    // write-then-rename keeps a half-written certificate from ever being read
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &text).map_err(internal)?;
    std::fs::rename(&tmp, &path).map_err(internal)?;
    Ok((path, text))
}

fn koly_err(err: KolyError) -> CliError {
    match err {
        KolyError::Inconclusive(r) => CliError::Inconclusive(r),
        KolyError::OutOfRange { m, bound } => invalid("m-out-of-range", format!("m = {m} exceeds M(c) = {bound}")),
        KolyError::BadP(p) => invalid("p-not-odd-prime", format!("p = {p}")),
        other => internal(other),
    }
}

/// Class certificate for kappa_{c,m}, or the report that P_c is divisible.
fn class_certificate(job: &JobSpec, settings: &Settings, log: &mut dyn Write) -> Result<(HeegnerRecord, Result<Certificate, String>), CliError> {
    let e = &job.curve;
    let (p, m) = (job.p.expect("validated"), job.m.expect("validated"));
    let rec = heegner_record(job, settings, log)?;
    let op = DerivativeOperator::from_record(&rec, 1).map_err(koly_err)?;
    let dp = derived_point(e, &rec, &op).map_err(koly_err)?;
    let surjective = Attestations::builtin().surjective(&e.label, p);
    let opts = DivisibilityOptions { place_budget: settings.place_budget, ..Default::default() };
    match class_nontrivial(e, &dp, p, m, job.m_bound.expect("validated"), surjective, &opts) {
        Ok(cert) => {
            cert.replay().map_err(|err| internal(format!("fresh certificate does not replay: {err}")))?;
            Ok((rec, Ok(cert)))
        }
        Err(KolyError::Divisible) => Ok((rec, Err(format!("P_{} lies in {}^{m} E(K[{}]), so kappa_{{{},{m}}} = 0", job.c, p, job.c, job.c)))),
        Err(err) => Err(koly_err(err)),
    }
}

fn verdict_block(out: &mut String, cert: &Certificate) {
    let _ = writeln!(out, "[verdict]");
    let _ = writeln!(
        out,
        "kappa_{{{c},{m}}} != 0: no Q in E(K[{c}]) with {n}Q = P_{c}; g(x) = phi_{n}(x) - X(P_{c}) psi_{n}(x)^2 has no root at the witness place q={q}",
        c = cert.c,
        m = cert.m,
        n = cert.n(),
        q = cert.witness.q
    );
    let _ = writeln!(out, "places probed={}", cert.transcript.len());
    let _ = writeln!(out, "[certificate]");
    out.push_str(&cert.to_text());
}

pub fn cmd_kolyvagin(label: &str, big_d: u64, c: u64, p: u64, m: u32, settings: &Settings, cert_out: Option<&Path>, log: &mut dyn Write) -> Result<Outcome, CliError> {
    let job = kolyvagin_job(label, big_d, c, p, m)?;
    let (rec, res) = class_certificate(&job, settings, log)?;
    let mut out = String::new();
    header(&mut out, "kolyvagin report", &job);
    record_block(&mut out, &rec);
    match res {
        Ok(cert) => {
            verdict_block(&mut out, &cert);
            let written = write_cert(settings, cert_out, &cert)?;
            Ok(Outcome { report: out, certificate: Some(written) })
        }
        Err(msg) => {
            let _ = writeln!(out, "[verdict]\n{msg}");
            Ok(Outcome { report: out, certificate: None })
        }
    }
}

fn reject(r: Rejection) -> CliError {
    match r {
        Rejection::NotCertified(d) => internal(format!("class certificate rejected: {d}")),
        other => CliError::Rejected { reason: other.name(), detail: other.to_string() },
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sha(
    label: &str,
    big_d: u64,
    c: u64,
    p: u64,
    m: u32,
    selmer_attested: bool,
    settings: &Settings,
    cert_out: Option<&Path>,
    log: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let job = kolyvagin_job(label, big_d, c, p, m)?;
    let e = &job.curve;
    // hypotheses that need no computation are checked before any is done
    if !selmer_attested {
        return Err(reject(Rejection::Selmer));
    }
    let f_c = f_of_c(c);
    if f_c.is_multiple_of(2) {
        return Err(reject(Rejection::Parity(f_c)));
    }
    if e.epsilon() != 1 {
        return Err(reject(Rejection::Epsilon(e.epsilon())));
    }
    let rank_one = RankAttestations::builtin().rank(&e.label, big_d) == Some(1);
    if !rank_one {
        return Err(reject(Rejection::RankOne));
    }
    let torsion = torsion_p_trivial(e, big_d, p, TORSION_SEARCH);
    let ctx = ShaContext { rank_one, torsion_p_trivial: torsion.is_some() };
    let (rec, res) = class_certificate(&job, settings, log)?;
    let cert = res.map_err(|msg| CliError::Rejected { reason: "certificate", detail: msg })?;
    let sha = sha_criterion(&cert, true, f_c, e.epsilon(), &ctx).map_err(reject)?;
    let mut out = String::new();
    header(&mut out, "sha report", &job);
    record_block(&mut out, &rec);
    let _ = writeln!(out, "[hypotheses]");
    let _ = writeln!(out, "selmer=attested");
    let _ = writeln!(out, "rank E(K)=1 (attested)");
    let _ = writeln!(out, "E(K)[{p}]=0 (q={} has {p} not dividing #E(F_q))", torsion.expect("checked by the criterion"));
    let _ = writeln!(out, "f_c={f_c} epsilon={}", e.epsilon());
    verdict_block(&mut out, &sha);
    let _ = writeln!(out, "[conclusion]\nkappa'_{{{c},{m}}} is a nonzero element of Sha(E/K)[{}]", p.pow(m));
    let written = write_cert(settings, cert_out, &sha)?;
    Ok(Outcome { report: out, certificate: Some(written) })
}

pub fn cmd_scan(label: &str, big_d: u64, p: u64, bound: u64) -> Result<Outcome, CliError> {
    let e = curve(label)?;
    validate_disc(&e, big_d)?;
    validate_p(&e, big_d, p)?;
    let primes = kolyvagin_primes(&e, big_d, p, bound).map_err(|err| invalid("p-divides-N", err.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(out, "# hkc scan report\ncurve={} N={}\nD={big_d} p={p} bound={bound}", e.label, e.conductor);
    let _ = writeln!(out, "ell a_ell M(ell)");
    for k in &primes {
        let _ = writeln!(out, "{} {} {}", k.ell, k.a_ell, k.m_ell);
    }
    let _ = writeln!(out, "count={}", primes.len());
    Ok(Outcome { report: out, certificate: None })
}

pub fn cmd_lvalue(label: &str, big_d: u64, c: u64) -> Result<Outcome, CliError> {
    let job = heegner_job(label, big_d, c)?;
    let e = &job.curve;
    let b = zhang_height_bound(e, big_d, c).map_err(|err| match err {
        LError::Unsupported(d) => invalid("unsupported-c", d),
        other => internal(other),
    })?;
    let p = plan(&job)?;
    let (lo, hi) = silverman_bounds(e);
    let mut out = String::new();
    header(&mut out, "lvalue report", &job);
    let _ = writeln!(out, "chi c' h(O_c') L'(f,chi',1) transfer h^(e_chi y_c)");
    for comp in &b.components {
        let exps: Vec<String> = comp.exps.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(
            out,
            "[{}]/{} {} {} {:.12e} {:.6} {:.12e}",
            exps.join(","),
            comp.modulus,
            comp.c_prime,
            comp.term.h,
            comp.term.lprime,
            comp.term.transfer,
            comp.hhat
        );
    }
    let _ = writeln!(out, "h^(y_c)={:.12e}", b.hhat_bound);
    let _ = writeln!(out, "h(x(y_c))<={:.12e}", b.hlog_bound);
    let _ = writeln!(out, "silverman h^-h in [{lo:.6}, {hi:.6}]");
    let _ = writeln!(out, "plan digits={} terms={}", p.digits, p.terms);
    Ok(Outcome { report: out, certificate: None })
}

/// Re-checks a certificate from its text alone.
pub fn cmd_replay(path: &Path) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path).map_err(|err| invalid("unreadable-certificate", err.to_string()))?;
    let cert = Certificate::parse(&text).map_err(|err| invalid("malformed-certificate", err.to_string()))?;
    cert.replay().map_err(|err| internal(format!("replay failed: {err}")))?;
    let mut out = String::new();
    let _ = writeln!(out, "# hkc replay report");
    let _ = writeln!(out, "kind={} curve={} D={} c={} p={} m={}", cert.kind.as_str(), cert.label, cert.big_d, cert.c, cert.p, cert.m);
    let _ = writeln!(out, "g.hash={}", cert.g_hash);
    let _ = writeln!(out, "witness q={} s={} r={}: no root, replayed", cert.witness.q, cert.witness.s, cert.witness.r);
    let _ = writeln!(out, "transcript {} places replayed", cert.transcript.len());
    let _ = writeln!(out, "verdict=non-divisible");
    Ok(Outcome { report: out, certificate: None })
}
