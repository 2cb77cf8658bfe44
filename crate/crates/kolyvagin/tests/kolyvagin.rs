use ecarith::ring::Ring;
use ecarith::{CurveData, CurveDb, Point};
use kolyvagin::*;
use modparam::{heegner_point, HeegnerOptions, HeegnerRecord};
use ringclass::Automorphism;
use rug::Rational;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

fn curve(label: &str) -> CurveData {
    CurveDb::builtin().get(label).unwrap().clone()
}

/// Records are shared between tests; recognition dominates the cost otherwise.
fn record(label: &str, big_d: u64, c: u64) -> HeegnerRecord {
    static CACHE: OnceLock<Mutex<HashMap<(String, u64, u64), HeegnerRecord>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (label.to_string(), big_d, c);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return r.clone();
    }
    let r = heegner_point(&curve(label), big_d, c, &HeegnerOptions::default()).unwrap();
    cache.lock().unwrap().insert(key, r.clone());
    r
}

fn p5(label: &str, big_d: u64) -> (CurveData, HeegnerRecord, DerivedPoint) {
    let e = curve(label);
    let rec = record(label, big_d, 5);
    let op = DerivativeOperator::from_record(&rec, 1).unwrap();
    let dp = derived_point(&e, &rec, &op).unwrap();
    (e, rec, dp)
}

fn opts() -> DivisibilityOptions {
    DivisibilityOptions::default()
}

#[test]
fn formal_operator_identity_up_to_50() {
    for ell in 2..=50 {
        assert!(formal_identity_holds(ell), "l = {ell}");
    }
}

#[test]
fn operator_identity_on_points() {
    for (label, d) in [("389A1", 7), ("53A1", 43)] {
        let e = curve(label);
        let rec = record(label, d, 5);
        let s = rec.galois_generator.clone().unwrap();
        assert!(operator_identity_check(&e, &rec, &s), "{label}");
        // a wrong "generator" breaks it
        assert!(!operator_identity_check(&e, &rec, &Automorphism::identity(&rec.field)));
    }
}

#[test]
fn derived_point_lives_on_the_short_model() {
    let (_, _, dp) = p5("389A1", 7);
    assert_eq!(dp.model.a, Rational::from((-7, 3)));
    assert_eq!(dp.model.b, Rational::from((107, 108)));
    assert!(dp.short_curve().on_curve(&dp.short));
    assert!(!dp.short.is_infinity());
}

#[test]
fn generator_of_wrong_order_is_rejected() {
    let rec = record("53A1", 43, 5);
    let s2 = rec.galois_generator.as_ref().unwrap().pow(&rec.field, 2);
    let err = DerivativeOperator::new(&rec.field, vec![(5, s2)]).unwrap_err();
    assert_eq!(err, KolyError::BadGeneratorOrder { ell: 5, found: Some(3) });
}

#[test]
fn c_equal_one_gives_y_k() {
    let e = curve("53A1");
    let rec = record("53A1", 43, 1);
    assert_eq!(rec.field.degree(), 1);
    let op = DerivativeOperator::from_record(&rec, 1).unwrap();
    assert!(op.factors.is_empty());
    let dp = derived_point(&e, &rec, &op).unwrap();
    assert_eq!(dp.point, rec.point);
    assert_eq!(f_of_c(1), 0);
    assert_eq!(epsilon_of_c(e.epsilon(), 1), e.epsilon());
}

fn assert_non_divisible(label: &str) -> Certificate {
    let (e, _, dp) = p5(label, 7);
    let cert = class_nontrivial(&e, &dp, 3, 1, MBound::Finite(1), Some(true), &opts()).unwrap();
    assert!(cert.transcript.len() <= 64);
    assert!(cert.transcript.iter().any(|p| p.place == cert.witness && p.roots == 0));
    cert.replay().unwrap();
    cert
}

#[test]
fn kappa_5_1_nonzero_for_389a1() {
    let cert = assert_non_divisible("389A1");
    assert_eq!(cert.f_c, 1);
    // root number +1, so epsilon = -1 and epsilon(5) = +1
    assert_eq!(cert.epsilon, -1);
    assert_eq!(cert.epsilon_c, 1);
    assert_eq!(cert.kind, CertKind::KolyvaginClass);
}

#[test]
fn kappa_5_1_nonzero_for_709a1_and_718b1() {
    assert_non_divisible("709A1");
    assert_non_divisible("718B1");
}

#[test]
fn verdict_does_not_depend_on_the_generator() {
    let e = curve("389A1");
    let rec = record("389A1", 7, 5);
    let a = derived_point(&e, &rec, &DerivativeOperator::from_record(&rec, 1).unwrap()).unwrap();
    let b = derived_point(&e, &rec, &DerivativeOperator::from_record(&rec, 5).unwrap()).unwrap();
    assert_ne!(a.point, b.point);
    assert_eq!(divisible_by_p(&a, 3, 1, &opts()).unwrap().kind(), "non-divisible");
    assert_eq!(divisible_by_p(&b, 3, 1, &opts()).unwrap().kind(), "non-divisible");
}

#[test]
fn planted_three_r_is_never_refuted_and_r_is_recovered() {
    for (label, d) in [("53A1", 43), ("389A1", 7)] {
        let e = curve(label);
        let rec = record(label, d, 5);
        let c = rec.curve(&e);
        let r = c.add(&rec.point, &ringclass::apply_aut(&c, &rec.point, rec.galois_generator.as_ref().unwrap()).unwrap()).unwrap();
        let planted = c.mul_i64(3, &r).unwrap();
        let dp = DerivedPoint::from_point(&e, d, 5, &rec.field, planted, "3R").unwrap();
        let v = divisible_by_p(&dp, 3, 1, &opts()).unwrap();
        assert!(v.transcript().len() >= 50);
        assert!(v.transcript().iter().all(|p| p.roots > 0), "{label}: a rootless place for a multiple of 3");
        let Verdict::Divisible { quotient, .. } = v else { panic!("{label}: {}", v.kind()) };
        let sc = dp.short_curve();
        assert_eq!(sc.mul_i64(3, &quotient).unwrap(), dp.short);
        // the planted quotient up to 3-torsion, which is trivial over K[5] here
        let r_short = dp.model.to_short(&rec.field, &r).unwrap();
        assert_eq!(quotient, r_short);
    }
}

#[test]
fn m_function_values() {
    let (_, _, dp) = p5("389A1", 7);
    let m = m_function(&dp, 3, MBound::Finite(1), &opts()).unwrap();
    assert_eq!(m.m_prime, MBound::Finite(0));
    assert_eq!(m.m_of_c, MBound::Finite(0));
    assert_eq!(m.probes, vec![(1, "non-divisible")]);

    let e = curve("53A1");
    let r53 = record("53A1", 43, 5);
    let c = r53.curve(&e);
    let nine = DerivedPoint::from_point(&e, 43, 5, &r53.field, c.mul_i64(9, &r53.point).unwrap(), "9R").unwrap();
    let m = m_function(&nine, 3, MBound::Finite(1), &opts()).unwrap();
    assert_eq!(m.m_prime, MBound::Infinity);
    assert_eq!(m.m_of_c, MBound::Infinity);
    assert!(m.inconclusive.is_none());

    // R = P_5 of 53A1 is not divisible by 3, so 3R has m' = 1
    let (_, _, p53) = p5("53A1", 43);
    let three = DerivedPoint::from_point(&e, 43, 5, &r53.field, c.mul_i64(3, &p53.point).unwrap(), "3R").unwrap();
    let m = m_function(&three, 3, MBound::Finite(2), &opts()).unwrap();
    assert_eq!(m.m_prime, MBound::Finite(1));
    assert_eq!(m.m_of_c, MBound::Finite(1));
}

#[test]
fn m_above_bound_is_out_of_range() {
    let (e, _, dp) = p5("389A1", 7);
    let err = class_nontrivial(&e, &dp, 3, 2, MBound::Finite(1), None, &opts()).unwrap_err();
    assert_eq!(err, KolyError::OutOfRange { m: 2, bound: MBound::Finite(1) });
}

fn sha_53a1() -> (Certificate, ShaContext) {
    let (e, _, dp) = p5("53A1", 43);
    let cert = class_nontrivial(&e, &dp, 3, 1, MBound::Finite(1), Some(true), &opts()).unwrap();
    let ctx = ShaContext {
        rank_one: RankAttestations::builtin().rank("53A1", 43) == Some(1),
        torsion_p_trivial: torsion_p_trivial(&e, 43, 3, 500).is_some(),
    };
    (cert, ctx)
}

#[test]
fn sha_element_for_53a1() {
    let (cert, ctx) = sha_53a1();
    assert_eq!(cert.epsilon, 1);
    let sha = sha_criterion(&cert, true, cert.f_c, cert.epsilon, &ctx).unwrap();
    assert_eq!(sha.kind, CertKind::ShaElement);
    sha.replay().unwrap();
    let text = sha.to_text();
    assert!(text.contains("kind=sha-element\n"));
    assert!(text.contains("assume.selmer=yes\n"));
    assert_eq!(Certificate::parse(&text).unwrap(), sha);
}

#[test]
fn sha_rejections_name_the_hypothesis() {
    let (cert, ctx) = sha_53a1();
    assert_eq!(sha_criterion(&cert, false, 1, 1, &ctx).unwrap_err().name(), "selmer");
    assert_eq!(sha_criterion(&cert, true, 2, 1, &ctx).unwrap_err().name(), "parity");
    assert_eq!(sha_criterion(&cert, true, 1, -1, &ctx).unwrap_err().name(), "epsilon");
    let no_rank = ShaContext { rank_one: false, ..ctx };
    assert_eq!(sha_criterion(&cert, true, 1, 1, &no_rank).unwrap_err().name(), "rank");
    let no_tors = ShaContext { torsion_p_trivial: false, ..ctx };
    assert_eq!(sha_criterion(&cert, true, 1, 1, &no_tors).unwrap_err().name(), "torsion");
}

#[test]
fn certificate_text_round_trip_and_tampering() {
    let cert = assert_non_divisible("709A1");
    let text = cert.to_text();
    let keys: Vec<&str> = text.lines().map(|l| l.split_once('=').unwrap().0).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let back = Certificate::parse(&text).unwrap();
    assert_eq!(back, cert);
    back.replay().unwrap();
    assert_eq!(back.to_text(), text);

    let mut bad = cert.clone();
    bad.witness.r = (bad.witness.r + 1) % bad.witness.q;
    assert!(bad.replay().is_err());
    let mut bad = cert.clone();
    bad.x = bad.field.add(&bad.x, &bad.field.one());
    assert!(bad.replay().is_err());
    let mut bad = cert.clone();
    bad.epsilon_c = -bad.epsilon_c;
    assert!(bad.replay().is_err());
    let mut bad = cert;
    bad.transcript[0].roots += 1;
    assert!(bad.replay().is_err());
}

#[test]
fn epsilon_flips_with_each_prime_factor() {
    for eps in [-1, 1] {
        assert_eq!(epsilon_of_c(eps, 1), eps);
        assert_eq!(epsilon_of_c(eps, 5), -eps);
        assert_eq!(epsilon_of_c(eps, 5 * 17), eps);
        assert_eq!(epsilon_of_c(eps, 5 * 17 * 41), -eps);
    }
}

#[test]
fn torsion_witness_for_53a1() {
    let e = curve("53A1");
    let q = torsion_p_trivial(&e, 43, 3, 500).unwrap();
    let a = ecarith::ap_count(&e, q).unwrap();
    assert_ne!((q as i64 + 1 - a) % 3, 0);
}

#[test]
fn char_sum_examples() {
    let cyc = Cyclotomic::new(6);
    assert_eq!(char_sum(5, &cyc.from_i64(1), &cyc).unwrap(), cyc.from_i64(15));
    assert_eq!(char_sum(5, &cyc.from_i64(-1), &cyc).unwrap(), cyc.from_i64(-3));
    let z = cyc.zeta_pow(1);
    let closed = char_sum(5, &z, &cyc).unwrap();
    let six_over = cyc.mul(&cyc.from_i64(6), &cyc.inv(&cyc.sub(&z, &cyc.from_i64(1))).unwrap());
    assert_eq!(closed, six_over);
    assert_eq!(closed, char_sum_direct(5, &z, &cyc).unwrap());
}

#[test]
fn char_sum_matches_direct_summation() {
    for ell in [5u64, 11] {
        let cyc = Cyclotomic::new(ell + 1);
        for k in 0..=ell {
            let chi = cyc.zeta_pow(k);
            assert_eq!(char_sum(ell, &chi, &cyc).unwrap(), char_sum_direct(ell, &chi, &cyc).unwrap(), "l = {ell}, k = {k}");
        }
    }
}

#[test]
fn char_sum_rejects_non_roots_of_unity() {
    let cyc = Cyclotomic::new(6);
    assert_eq!(char_sum(5, &cyc.from_i64(2), &cyc).unwrap_err(), KolyError::NotRootOfUnity);
    // a primitive 6th root is not a 4th root of unity
    assert_eq!(char_sum(3, &cyc.zeta_pow(1), &cyc).unwrap_err(), KolyError::NotRootOfUnity);
}

#[test]
fn infinity_is_not_a_derived_point() {
    let e = curve("53A1");
    let rec = record("53A1", 43, 5);
    let dp = DerivedPoint::from_point(&e, 43, 5, &rec.field, Point::Infinity, "O").unwrap();
    assert!(divisible_by_p(&dp, 3, 1, &opts()).is_err());
    assert_eq!(divisible_by_p(&dp, 2, 1, &opts()).unwrap_err(), KolyError::BadP(2));
}
