//! key=value text persistence of Heegner records.

use crate::heegner::{heegner_setup, HeegnerRecord, Irreducibility};
use crate::ParamError;
use ecarith::{CurveData, Point};
use ringclass::{Automorphism, QuadField, RingClassField};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub fn record_to_text(r: &HeegnerRecord) -> String {
    let l = &r.field;
    let k = &l.base;
    let mut out = String::new();
    let mut put = |key: &str, val: String| {
        out.push_str(key);
        out.push('=');
        out.push_str(&val);
        out.push('\n');
    };
    put("label", r.label.clone());
    put("D", r.big_d.to_string());
    put("c", r.c.to_string());
    put("beta", r.beta.to_string());
    put("bits", r.bits.to_string());
    put("terms", r.terms.to_string());
    put("F", l.f.iter().map(|c| k.format(c)).collect::<Vec<_>>().join(";"));
    if let Point::Affine(x, y) = &r.point {
        put("x", l.format_elem(x));
        put("y", l.format_elem(y));
    }
    if let Some(g) = &r.galois_generator {
        put("generator", l.format_elem(&g.image_of_alpha));
        put("generator_order", g.order.to_string());
    }
    put(
        "irreducibility",
        match r.irreducibility {
            Irreducibility::Linear => "linear".into(),
            Irreducibility::Witness(q) => format!("witness {q}"),
            Irreducibility::Unproven => "unproven".into(),
        },
    );
    out
}

fn bad(msg: &str) -> ParamError {
    ParamError::Cache(msg.to_string())
}

/// Rebuilds a record; the class group data is recomputed from (E, D, c).
pub fn parse_record(e: &CurveData, text: &str) -> Result<HeegnerRecord, ParamError> {
    let mut kv = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| bad(&format!("malformed line {line:?}")))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| kv.get(k).ok_or_else(|| bad(&format!("missing key {k}")));
    let num = |k: &str| -> Result<u64, ParamError> { get(k)?.parse().map_err(|_| bad(&format!("bad number for {k}"))) };
    if !get("label")?.eq_ignore_ascii_case(&e.label) {
        return Err(bad("record belongs to another curve"));
    }
    let big_d = num("D")?;
    let c = num("c")?;
    let k = QuadField::new(big_d);
    let f: Option<Vec<_>> = get("F")?.split(';').map(|t| k.parse(t)).collect();
    let field = RingClassField::new(k, f.ok_or_else(|| bad("bad F"))?)?;
    let x = field.parse_elem(get("x")?).ok_or_else(|| bad("bad x"))?;
    let y = field.parse_elem(get("y")?).ok_or_else(|| bad("bad y"))?;
    let point = Point::Affine(x, y);
    let curve = ringclass::curve_over(&field, &e.a);
    if !curve.on_curve(&point) {
        return Err(ParamError::NotOnCurve);
    }
    let galois_generator = match kv.get("generator") {
        None => None,
        Some(g) => {
            let image_of_alpha = field.parse_elem(g).ok_or_else(|| bad("bad generator"))?;
            let order = num("generator_order")? as usize;
            let aut = Automorphism { image_of_alpha, order };
            if !aut.is_root_of_f(&field) {
                return Err(bad("generator does not map alpha to a root of F"));
            }
            Some(aut)
        }
    };
    let irreducibility = match get("irreducibility")?.as_str() {
        "linear" => Irreducibility::Linear,
        "unproven" => Irreducibility::Unproven,
        s => Irreducibility::Witness(s.strip_prefix("witness ").and_then(|q| q.parse().ok()).ok_or_else(|| bad("bad irreducibility"))?),
    };
    let (pic, taus) = heegner_setup(e, big_d, c)?;
    Ok(HeegnerRecord {
        label: e.label.clone(),
        big_d,
        c,
        beta: get("beta")?.parse().map_err(|_| bad("bad beta"))?,
        pic,
        taus,
        field,
        point,
        galois_generator,
        irreducibility,
        bits: num("bits")? as u32,
        terms: num("terms")? as usize,
        embeddings: None,
    })
}

pub fn load_record(e: &CurveData, path: &Path) -> Result<HeegnerRecord, ParamError> {
    let text = std::fs::read_to_string(path).map_err(|err| bad(&err.to_string()))?;
    parse_record(e, &text)
}

/// Writes to a sibling temporary file and renames it into place.
pub fn save_record_atomic(r: &HeegnerRecord, path: &Path) -> Result<(), ParamError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|err| bad(&err.to_string()))?;
    let tmp = dir.join(format!(".{}.tmp{}", path.file_name().and_then(|s| s.to_str()).unwrap_or("record"), std::process::id()));
    let mut fh = std::fs::File::create(&tmp).map_err(|err| bad(&err.to_string()))?;
    fh.write_all(record_to_text(r).as_bytes()).map_err(|err| bad(&err.to_string()))?;
    fh.sync_all().map_err(|err| bad(&err.to_string()))?;
    std::fs::rename(&tmp, path).map_err(|err| bad(&err.to_string()))
}
