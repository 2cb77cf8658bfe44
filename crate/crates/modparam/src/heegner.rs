//! Complex embeddings of y_c and its conjugates, and their recognition over K.

use crate::lattice::{curve_lattice, weierstrass_p, PeriodLattice};
use crate::phi::{phi_tau, required_terms};
use crate::ParamError;
use classgroup::{heegner_taus, is_heegner_discriminant, reduced_forms, HeegnerTau, PicGroup, QuadOrder};
use ecarith::numth::{factor, gcd, is_prime, kronecker};
use ecarith::ring::{PrimeField, Ring};
use ecarith::{an_coeffs, CurveData, Point, Poly, PolyRing};
use mpkernel::{cpoly, digits_to_bits, BigComplex};
use rayon::prelude::*;
use ringclass::{curve_over, find_galois_generator, trace_point, Automorphism, QuadElem, QuadField, RcfElem, RingClassField, RingError};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

#[derive(Clone, Debug)]
pub struct HeegnerOptions {
    pub digits: u32,
    /// Precision doublings allowed after the first attempt.
    pub retries: u32,
    /// Overrides the number of q-expansion terms.
    pub terms: Option<usize>,
}

impl Default for HeegnerOptions {
    fn default() -> Self {
        HeegnerOptions { digits: 60, retries: 4, terms: None }
    }
}

/// Floating data of one attempt, indexed by class.
#[derive(Clone, Debug)]
pub struct Embeddings {
    pub bits: u32,
    pub terms: usize,
    pub lattice: PeriodLattice,
    pub z: Vec<BigComplex>,
    pub x: Vec<BigComplex>,
    pub y: Vec<BigComplex>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Irreducibility {
    /// Degree one.
    Linear,
    /// F stays irreducible modulo a degree-one prime of K above q.
    Witness(u64),
    Unproven,
}

#[derive(Clone, Debug)]
pub struct HeegnerRecord {
    pub label: String,
    pub big_d: u64,
    pub c: u64,
    pub beta: i64,
    pub pic: PicGroup,
    pub taus: Vec<HeegnerTau>,
    /// K[c] = K[alpha] with alpha the x-coordinate of y_c.
    pub field: RingClassField,
    /// y_c on the database model.
    pub point: Point<RcfElem>,
    pub galois_generator: Option<Automorphism>,
    pub irreducibility: Irreducibility,
    pub bits: u32,
    pub terms: usize,
    /// Present when the record was computed rather than loaded.
    pub embeddings: Option<Embeddings>,
}

impl HeegnerRecord {
    pub fn h(&self) -> usize {
        self.pic.h()
    }

    pub fn curve(&self, e: &CurveData) -> ecarith::Curve<RingClassField> {
        curve_over(&self.field, &e.a)
    }

    /// Coefficients of F, lowest degree first.
    pub fn f_coeffs(&self) -> &[QuadElem] {
        &self.field.f
    }

    /// F with rational coefficients, when it has them.
    pub fn f_rational(&self) -> Option<Vec<Rational>> {
        self.field.f.iter().map(|c| c.is_rational().then(|| c.u.clone())).collect()
    }
}

/// Class group data, Heegner forms and validity checks for (E, D, c).
pub fn heegner_setup(e: &CurveData, big_d: u64, c: u64) -> Result<(PicGroup, Vec<HeegnerTau>), ParamError> {
    let order = QuadOrder::new(big_d, c)?;
    if !is_heegner_discriminant(e, big_d)? {
        return Err(ParamError::Class(classgroup::ClassError::NoSquareRoot(-(big_d as i64), 4 * e.conductor as i64)));
    }
    if gcd(c, e.conductor) != 1 {
        return Err(ParamError::Class(classgroup::ClassError::LevelNotCoprime(c, e.conductor)));
    }
    let pic = reduced_forms(order.disc())?;
    let taus = heegner_taus(&pic, e.conductor, 64)?;
    Ok((pic, taus))
}

/// All conjugate embeddings at `bits` of precision.
pub fn heegner_embeddings(e: &CurveData, taus: &[HeegnerTau], bits: u32, terms: Option<usize>) -> Result<Embeddings, ParamError> {
    let wp = bits + 32;
    let lattice = curve_lattice(e, wp)?;
    let ymin = taus.iter().map(|t| t.im()).fold(f64::INFINITY, f64::min);
    let n = terms.unwrap_or_else(|| required_terms(ymin, wp));
    let a = an_coeffs(e, n);
    let [b2, _, _, _] = e.b_invariants();
    let b2_12 = Float::with_val(wp, &b2) / 12u32;
    let a1 = Float::with_val(wp, &e.a[0]);
    let a3 = Float::with_val(wp, &e.a[2]);
    // the forms carry exact data; recompute tau at the working precision
    let sq = Float::with_val(wp, taus.first().map(|t| t.form.discriminant()).unwrap_or(-1).unsigned_abs()).sqrt();
    let out: Result<Vec<(BigComplex, BigComplex, BigComplex)>, ParamError> = taus
        .par_iter()
        .map(|t| {
            let den = Float::with_val(wp, 2 * t.form.a);
            let tau = BigComplex::new(Float::with_val(wp, -t.form.b) / &den, Float::with_val(wp, &sq / &den));
            let img = phi_tau(&a, &tau, wp)?;
            let z = lattice.reduce(&img.z);
            let (p, pp) = weierstrass_p(&z, &lattice, wp)?;
            let x = &p - &BigComplex::from_real(b2_12.clone());
            let lin = &x.mul_real(&a1) + &BigComplex::from_real(a3.clone());
            let y = (&pp - &lin).div_i64(2);
            Ok((z, x, y))
        })
        .collect();
    let out = out?;
    Ok(Embeddings {
        bits,
        terms: n,
        lattice,
        z: out.iter().map(|t| t.0.clone()).collect(),
        x: out.iter().map(|t| t.1.clone()).collect(),
        y: out.iter().map(|t| t.2.clone()).collect(),
    })
}

fn recognize_poly(k: &QuadField, coeffs: &[BigComplex], max_den: &Integer, bits: u32) -> Result<Vec<QuadElem>, ParamError> {
    coeffs.iter().map(|z| k.recognize(z, max_den).ok_or(ParamError::NeedPrecision(bits))).collect()
}

/// Exact F, y_c and the Galois generator from one set of embeddings.
pub fn recognize(e: &CurveData, big_d: u64, c: u64, pic: &PicGroup, taus: &[HeegnerTau], emb: Embeddings) -> Result<HeegnerRecord, ParamError> {
    let bits = emb.bits;
    let k = QuadField::new(big_d);
    let max_den = Integer::from(1) << (bits / 3);
    let f_num = cpoly::from_roots(&emb.x);
    let f = recognize_poly(&k, &f_num, &max_den, bits)?;
    let field = RingClassField::new(k, f)?;
    // the recognized F must vanish at every embedding to half precision
    let fc: Vec<BigComplex> = field.f.iter().map(|q| k.embed(q, bits + 32)).collect();
    for x in &emb.x {
        let scale = Float::with_val(bits, x.abs() + 1u32).pow(field.degree() as u32);
        if Float::with_val(bits, cpoly::eval(&fc, x).abs() / scale) > (Float::with_val(bits, 1) >> (bits as i32 / 2)) {
            return Err(ParamError::NeedPrecision(bits));
        }
    }
    // y = G(alpha) with G interpolating the conjugates
    let g_num = cpoly::interpolate(&emb.x, &emb.y);
    let g = recognize_poly(&k, &g_num, &max_den, bits)?;
    let y = field.reduce(field.poly_ring().normalize(g));
    let alpha = field.alpha();
    let curve = curve_over(&field, &e.a);
    if !field.is_zero(&curve.equation(&alpha, &y)) {
        return Err(ParamError::NeedPrecision(bits));
    }
    let point = Point::Affine(alpha, y);
    let h = pic.h();
    let galois_generator = if h == 1 {
        Some(Automorphism::identity(&field))
    } else if pic.generator.is_some() {
        match find_galois_generator(&field, &emb.x, pic) {
            Ok(g) => Some(g),
            Err(RingError::NeedPrecision(b)) => return Err(ParamError::NeedPrecision(b)),
            Err(other) => return Err(other.into()),
        }
    } else {
        None
    };
    let irreducibility = if h == 1 {
        Irreducibility::Linear
    } else {
        irreducibility_witness(&field.f, big_d, 20_000).map(Irreducibility::Witness).unwrap_or(Irreducibility::Unproven)
    };
    let beta = taus.first().map(|t| t.beta).unwrap_or(0);
    Ok(HeegnerRecord {
        label: e.label.clone(),
        big_d,
        c,
        beta,
        pic: pic.clone(),
        taus: taus.to_vec(),
        field,
        point,
        galois_generator,
        irreducibility,
        bits,
        terms: emb.terms,
        embeddings: Some(emb),
    })
}

/// Computes y_c, doubling the precision on recognition failure.
pub fn heegner_point(e: &CurveData, big_d: u64, c: u64, opts: &HeegnerOptions) -> Result<HeegnerRecord, ParamError> {
    let (pic, taus) = heegner_setup(e, big_d, c)?;
    let mut bits = digits_to_bits(opts.digits);
    for attempt in 0..=opts.retries {
        let emb = heegner_embeddings(e, &taus, bits, opts.terms)?;
        match recognize(e, big_d, c, &pic, &taus, emb) {
            Ok(r) => return Ok(r),
            Err(ParamError::NeedPrecision(_)) if attempt < opts.retries => bits *= 2,
            Err(ParamError::NeedPrecision(_)) => break,
            Err(other) => return Err(other),
        }
    }
    Err(ParamError::RetriesExhausted(opts.retries))
}

/// Square root of -D modulo q, by search.
fn sqrt_minus_d(big_d: u64, q: u64) -> Option<u64> {
    let t = (q - big_d % q) % q;
    (0..q).find(|s| (s * s) % q == t)
}

/// Reduction of a K-polynomial at the prime above q where sqrt(-D) -> s.
pub fn reduce_at(f: &[QuadElem], q: u64, s: u64) -> Option<Vec<u64>> {
    let fq = PrimeField::new(q);
    f.iter()
        .map(|c| {
            let u = fq.reduce_rational(&c.u).ok()?;
            let v = fq.reduce_rational(&c.v).ok()?;
            Some(fq.add(&u, &fq.mul(&v, &s)))
        })
        .collect()
}

/// Rabin's test over F_q.
pub fn irreducible_mod(f: &[u64], q: u64) -> bool {
    let fq = PrimeField::new(q);
    let r = PolyRing::new(fq);
    let f: Poly<u64> = r.normalize(f.to_vec());
    let n = match r.degree(&f) {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    let x = r.x();
    let qi = Integer::from(q);
    // frob[k] = x^{q^k} mod f
    let mut frob = vec![r.rem(&x, &f).unwrap()];
    for _ in 0..n {
        let next = r.powmod(frob.last().unwrap(), &qi, &f).unwrap();
        frob.push(next);
    }
    if r.sub(&frob[n], &frob[0]) != r.zero() {
        return false;
    }
    factor(n as u64).iter().all(|&(p, _)| {
        let d = r.sub(&frob[n / p as usize], &x);
        r.degree(&r.gcd(&d, &f).unwrap()) == Some(0)
    })
}

/// A prime q split in K such that F stays irreducible modulo a prime above q.
pub fn irreducibility_witness(f: &[QuadElem], big_d: u64, max_q: u64) -> Option<u64> {
    for q in 3..max_q {
        if !is_prime(q) || big_d.is_multiple_of(q) || kronecker(-(big_d as i64), q) != 1 {
            continue;
        }
        let Some(s) = sqrt_minus_d(big_d, q) else { continue };
        let Some(fq) = reduce_at(f, q, s) else { continue };
        if fq.len() != f.len() {
            continue;
        }
        if irreducible_mod(&fq, q) {
            return Some(q);
        }
    }
    None
}

/// Tr_{K[c]/K}(y_c), exactly in K.
pub fn trace_to_k(e: &CurveData, rec: &HeegnerRecord) -> Result<Point<QuadElem>, ParamError> {
    let curve = rec.curve(e);
    let s = rec.galois_generator.as_ref().ok_or(ParamError::Ring(RingError::NotCyclic))?;
    let t = trace_point(&curve, &rec.point, s)?;
    let to_k = |a: &RcfElem| -> Result<QuadElem, ParamError> {
        match a.len() {
            0 => Ok(rec.field.base.zero()),
            1 => Ok(a[0].clone()),
            _ => Err(ParamError::NotOverK),
        }
    };
    match t {
        Point::Infinity => Ok(Point::Infinity),
        Point::Affine(x, y) => Ok(Point::Affine(to_k(&x)?, to_k(&y)?)),
    }
}

impl From<ecarith::ArithError> for ParamError {
    fn from(e: ecarith::ArithError) -> Self {
        ParamError::Ring(RingError::Arith(e))
    }
}
