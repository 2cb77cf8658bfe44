//! Certificates as sorted key=value text, and their replay from the text alone.

use crate::divisibility::{count_roots, DivisionProblem, Place, Probe};
use crate::KolyError;
use classgroup::MBound;
use ecarith::numth::factor;
use ringclass::{QuadField, RcfElem, RingClassField};
use rug::Rational;
use std::collections::BTreeMap;

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertKind {
    KolyvaginClass,
    ShaElement,
}

impl CertKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertKind::KolyvaginClass => "kolyvagin-class",
            CertKind::ShaElement => "sha-element",
        }
    }
}

/// Assumptions recorded with a certificate; None means not supplied.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Assumptions {
    pub surjective: Option<bool>,
    pub selmer_attested: Option<bool>,
    pub rank_one: Option<bool>,
    pub torsion_p_trivial: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub kind: CertKind,
    pub label: String,
    pub big_d: u64,
    pub c: u64,
    pub p: u64,
    pub m: u32,
    pub m_bound: MBound,
    /// Short model y^2 = x^3 + Ax + B the point lives on.
    pub a: Rational,
    pub b: Rational,
    pub field: RingClassField,
    /// X(P_c) on the short model.
    pub x: RcfElem,
    pub g_hash: String,
    pub witness: Place,
    pub g_mod: Vec<u64>,
    pub transcript: Vec<Probe>,
    pub f_c: u32,
    pub epsilon: i32,
    pub epsilon_c: i32,
    pub assumptions: Assumptions,
    pub provenance: String,
    pub note: Option<String>,
}

fn yes_no(b: Option<bool>) -> String {
    match b {
        Some(true) => "yes".into(),
        Some(false) => "no".into(),
        None => "unattested".into(),
    }
}

fn parse_yes_no(s: &str) -> Option<Option<bool>> {
    match s {
        "yes" => Some(Some(true)),
        "no" => Some(Some(false)),
        "unattested" => Some(None),
        _ => None,
    }
}

/// Number of distinct prime factors.
pub fn f_of_c(c: u64) -> u32 {
    if c == 1 {
        0
    } else {
        factor(c).len() as u32
    }
}

pub fn epsilon_of_c(epsilon: i32, c: u64) -> i32 {
    if f_of_c(c).is_multiple_of(2) {
        epsilon
    } else {
        -epsilon
    }
}

fn bad(msg: impl Into<String>) -> KolyError {
    KolyError::Certificate(msg.into())
}

impl Certificate {
    pub fn n(&self) -> u64 {
        self.p.pow(self.m)
    }

    pub fn to_text(&self) -> String {
        let k = &self.field.base;
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("kind", self.kind.as_str().into());
        kv.insert("version", FORMAT_VERSION.into());
        kv.insert("label", self.label.clone());
        kv.insert("D", self.big_d.to_string());
        kv.insert("c", self.c.to_string());
        kv.insert("p", self.p.to_string());
        kv.insert("m", self.m.to_string());
        kv.insert("M_c", self.m_bound.to_string());
        kv.insert("model.A", self.a.to_string());
        kv.insert("model.B", self.b.to_string());
        kv.insert("field.F", self.field.f.iter().map(|c| k.format(c)).collect::<Vec<_>>().join(";"));
        kv.insert("point.X", self.field.format_elem(&self.x));
        kv.insert("g.hash", self.g_hash.clone());
        kv.insert("g.degree", (self.n() * self.n()).to_string());
        kv.insert("witness.q", self.witness.q.to_string());
        kv.insert("witness.s", self.witness.s.to_string());
        kv.insert("witness.r", self.witness.r.to_string());
        kv.insert("witness.g_mod", self.g_mod.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","));
        kv.insert("witness.roots", "0".into());
        kv.insert("transcript.count", self.transcript.len().to_string());
        kv.insert(
            "transcript",
            self.transcript.iter().map(|p| format!("{}:{}:{}:{}", p.place.q, p.place.s, p.place.r, p.roots)).collect::<Vec<_>>().join(" "),
        );
        kv.insert("parity.f_c", self.f_c.to_string());
        kv.insert("sign.epsilon", self.epsilon.to_string());
        kv.insert("sign.epsilon_c", self.epsilon_c.to_string());
        kv.insert("assume.surjective", yes_no(self.assumptions.surjective));
        if self.kind == CertKind::ShaElement {
            kv.insert("assume.selmer", yes_no(self.assumptions.selmer_attested));
            kv.insert("assume.rank_one", yes_no(self.assumptions.rank_one));
            kv.insert("assume.torsion_p_trivial", yes_no(self.assumptions.torsion_p_trivial));
        }
        kv.insert("provenance", self.provenance.clone());
        if let Some(n) = &self.note {
            kv.insert("note", n.clone());
        }
        let mut out = String::new();
        for (k, v) in kv {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, KolyError> {
        let mut kv = BTreeMap::new();
        for line in text.lines() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("malformed line {line:?}")))?;
            kv.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| kv.get(k).map(|s| s.as_str()).ok_or_else(|| bad(format!("missing key {k}")));
        fn num<T: std::str::FromStr>(s: &str, k: &str) -> Result<T, KolyError> {
            s.parse().map_err(|_| bad(format!("bad value for {k}")))
        }
        let kind = match get("kind")? {
            "kolyvagin-class" => CertKind::KolyvaginClass,
            "sha-element" => CertKind::ShaElement,
            s => return Err(bad(format!("unknown kind {s}"))),
        };
        if get("version")? != FORMAT_VERSION {
            return Err(bad("unsupported version"));
        }
        let big_d: u64 = num(get("D")?, "D")?;
        let k = QuadField::new(big_d);
        let f: Option<Vec<_>> = get("field.F")?.split(';').map(|t| k.parse(t)).collect();
        let field = RingClassField::new(k, f.ok_or_else(|| bad("bad field.F"))?)?;
        let x = field.parse_elem(get("point.X")?).ok_or_else(|| bad("bad point.X"))?;
        let m_bound = match get("M_c")? {
            "inf" => MBound::Infinity,
            s => MBound::Finite(num(s, "M_c")?),
        };
        let witness = Place { q: num(get("witness.q")?, "witness.q")?, s: num(get("witness.s")?, "witness.s")?, r: num(get("witness.r")?, "witness.r")? };
        let g_mod = get("witness.g_mod")?.split(',').map(|t| num(t, "witness.g_mod")).collect::<Result<Vec<u64>, _>>()?;
        let mut transcript = vec![];
        for item in get("transcript")?.split_whitespace() {
            let parts: Vec<&str> = item.split(':').collect();
            if parts.len() != 4 {
                return Err(bad(format!("bad transcript entry {item}")));
            }
            transcript.push(Probe {
                place: Place { q: num(parts[0], "q")?, s: num(parts[1], "s")?, r: num(parts[2], "r")? },
                roots: num(parts[3], "roots")?,
            });
        }
        if num::<usize>(get("transcript.count")?, "transcript.count")? != transcript.len() {
            return Err(bad("transcript length mismatch"));
        }
        let yn = |key: &str| -> Result<Option<bool>, KolyError> {
            match kv.get(key) {
                None => Ok(None),
                Some(v) => parse_yes_no(v).ok_or_else(|| bad(format!("bad value for {key}"))),
            }
        };
        Ok(Certificate {
            kind,
            label: get("label")?.to_string(),
            big_d,
            c: num(get("c")?, "c")?,
            p: num(get("p")?, "p")?,
            m: num(get("m")?, "m")?,
            m_bound,
            a: num(get("model.A")?, "model.A")?,
            b: num(get("model.B")?, "model.B")?,
            field,
            x,
            g_hash: get("g.hash")?.to_string(),
            witness,
            g_mod,
            transcript,
            f_c: num(get("parity.f_c")?, "parity.f_c")?,
            epsilon: num(get("sign.epsilon")?, "sign.epsilon")?,
            epsilon_c: num(get("sign.epsilon_c")?, "sign.epsilon_c")?,
            assumptions: Assumptions {
                surjective: yn("assume.surjective")?,
                selmer_attested: yn("assume.selmer")?,
                rank_one: yn("assume.rank_one")?,
                torsion_p_trivial: yn("assume.torsion_p_trivial")?,
            },
            provenance: get("provenance")?.to_string(),
            note: kv.get("note").cloned(),
        })
    }

    /// Recomputes g from the exact data, every transcript entry and the witness
    /// verdict, plus the sign and parity bookkeeping.
    pub fn replay(&self) -> Result<(), KolyError> {
        let prob = DivisionProblem::new(&self.field, &self.a, &self.b, &self.x, self.n())?;
        if prob.g_hash() != self.g_hash {
            return Err(bad("g hash mismatch"));
        }
        if !prob.place_is_valid(&self.witness) {
            return Err(bad("witness is not a degree-1 place"));
        }
        if prob.reduce_g(&self.witness).as_deref() != Some(&self.g_mod[..]) {
            return Err(bad("reduced g does not match the witness data"));
        }
        if count_roots(&self.g_mod, self.witness.q) != 0 {
            return Err(bad("reduced g has a root at the witness place"));
        }
        let mut prev: Option<Place> = None;
        for pr in &self.transcript {
            if prev.is_some_and(|p| p >= pr.place) {
                return Err(bad("transcript is not in sorted order"));
            }
            prev = Some(pr.place);
            if !prob.place_is_valid(&pr.place) || prob.probe(&pr.place).map(|x| x.roots) != Some(pr.roots) {
                return Err(bad(format!("transcript entry at q = {} does not replay", pr.place.q)));
            }
        }
        if !self.transcript.iter().any(|pr| pr.place == self.witness && pr.roots == 0) {
            return Err(bad("witness missing from transcript"));
        }
        if self.f_c != f_of_c(self.c) || self.epsilon_c != epsilon_of_c(self.epsilon, self.c) {
            return Err(bad("parity or sign bookkeeping is inconsistent"));
        }
        if let MBound::Finite(mc) = self.m_bound {
            if self.m > mc {
                return Err(bad("m exceeds M(c)"));
            }
        }
        if self.kind == CertKind::ShaElement {
            let a = &self.assumptions;
            if a.selmer_attested != Some(true) || self.f_c.is_multiple_of(2) || self.epsilon != 1 || a.rank_one != Some(true) || a.torsion_p_trivial != Some(true) {
                return Err(bad("sha hypotheses not recorded as satisfied"));
            }
        }
        Ok(())
    }
}
