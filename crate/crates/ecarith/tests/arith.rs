use ecarith::ap::{ap_any, ap_direct};
use ecarith::numth::{gcd, is_prime, primes_up_to};
use ecarith::symbolic::ZAB;
use ecarith::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Integer, Rational};

fn db() -> CurveDb {
    CurveDb::builtin()
}

#[test]
fn first_coefficients_match_printed_expansions() {
    let d = db();
    let cases: [(&str, [i64; 10]); 4] = [
        ("53A1", [1, -1, -3, -1, 0, 3, -4, 3, 6, 0]),
        ("389A1", [1, -2, -2, 2, -3, 4, -5, 0, 1, 6]),
        ("709A1", [1, -2, -1, 2, -3, 2, -4, 0, -2, 6]),
        ("718B1", [1, -1, -2, 1, -3, 2, -5, -1, 1, 3]),
    ];
    for (label, want) in cases {
        let an = an_coeffs(d.get(label).unwrap(), 10);
        assert_eq!(&an[1..], &want, "{label}");
    }
}

#[test]
fn single_traces() {
    let d = db();
    assert_eq!(ap_count(d.get("389A1").unwrap(), 5).unwrap(), -3);
    assert_eq!(ap_count(d.get("53A1").unwrap(), 7).unwrap(), -4);
    assert_eq!(ap_count(d.get("709A1").unwrap(), 3).unwrap(), -1);
    assert_eq!(ap_count(d.get("53A1").unwrap(), 53), Err(CurveError::BadPrime(53)));
    assert_eq!(ap_count(d.get("53A1").unwrap(), 9), Err(CurveError::NotPrime(9)));
}

#[test]
fn square_of_bad_two() {
    let e = db().get("718B1").unwrap().clone();
    let an = an_coeffs(&e, 64);
    assert_eq!(an[4], an[2] * an[2]);
    assert_eq!(an[8], an[2].pow(3));
}

#[test]
fn hasse_and_multiplicativity_up_to_ten_thousand() {
    let d = db();
    for label in ["53A1", "389A1", "709A1", "718B1"] {
        let e = d.get(label).unwrap();
        let an = an_coeffs(e, 10_000);
        for p in primes_up_to(10_000) {
            let ap = an[p as usize];
            assert!((ap * ap) as u64 <= 4 * p, "{label} p={p}");
        }
        for m in 2..100usize {
            for n in 2..100usize {
                if gcd(m as u64, n as u64) == 1 {
                    assert_eq!(an[m * n], an[m] * an[n]);
                }
            }
        }
    }
}

#[test]
fn large_primes_use_bsgs_consistently() {
    let e = db().get("53A1").unwrap().clone();
    let ps: Vec<u64> = (65_600u64..67_000).filter(|&p| is_prime(p)).take(25).collect();
    for p in ps {
        let a = ap_any(&e, p);
        assert_eq!(a, ap_direct(&e, p));
        assert!((a * a) as u64 <= 4 * p);
    }
}

#[test]
fn short_models() {
    let d = db();
    let s = to_short_weierstrass(d.get("389A1").unwrap()).unwrap();
    assert_eq!(s.a, Rational::from((-7, 3)));
    assert_eq!(s.b, Rational::from((107, 108)));
    let s = to_short_weierstrass_integral(d.get("53A1").unwrap()).unwrap();
    assert_eq!((s.a.clone(), s.b.clone()), (Rational::from(405), Rational::from(16038)));
    let already = CurveData::new("X", [0, 0, 0, 0, 1], 36, 1, None, 6);
    let s = to_short_weierstrass(&already).unwrap();
    assert_eq!((s.a.clone(), s.b.clone()), (Rational::from(0), Rational::from(1)));
    assert_eq!((s.u.clone(), s.r.clone(), s.s.clone(), s.t.clone()), (Rational::from(1), Rational::new(), Rational::new(), Rational::new()));
    assert_eq!(to_short_weierstrass(&CurveData::new("S", [0, 0, 0, 0, 0], 1, 1, None, 1)), Err(CurveError::Singular));
}

#[test]
fn model_changes_round_trip_points() {
    let d = db();
    let e = d.get("389A1").unwrap();
    let big = e.over_q();
    let p = Point::Affine(Rational::from(0), Rational::from(0));
    let q = Point::Affine(Rational::from(-1), Rational::from(1));
    for s in [to_short_weierstrass(e).unwrap(), to_short_weierstrass_integral(e).unwrap()] {
        let short = s.curve();
        for k in 1..5 {
            let r = big.add(&big.mul_i64(k, &p).unwrap(), &q).unwrap();
            let t = s.to_short(&Rationals, &r).unwrap();
            assert!(short.on_curve(&t));
            assert_eq!(s.from_short(&Rationals, &t).unwrap(), r);
        }
        // the change of model is a group isomorphism
        let sp = s.to_short(&Rationals, &p).unwrap();
        let sq = s.to_short(&Rationals, &q).unwrap();
        let sum = s.to_short(&Rationals, &big.add(&p, &q).unwrap()).unwrap();
        assert_eq!(short.add(&sp, &sq).unwrap(), sum);
    }
}

fn random_curve_point(rng: &mut ChaCha8Rng) -> (Curve<PrimeField>, Point<u64>) {
    loop {
        let q = loop {
            let q = rng.gen_range(5u64..10_000);
            if is_prime(q) {
                break q;
            }
        };
        let f = PrimeField::new(q);
        let a = rng.gen_range(0..q);
        let b = rng.gen_range(0..q);
        let disc = f.add(&f.mul_i64(&f.pow(&a, 3), 4), &f.mul_i64(&f.mul(&b, &b), 27));
        if disc == 0 {
            continue;
        }
        for _ in 0..50 {
            let x = rng.gen_range(0..q);
            let rhs = f.add(&f.add(&f.pow(&x, 3), &f.mul(&a, &x)), &b);
            if let Some(y) = f.sqrt(rhs) {
                return (Curve::short(f, a, b), Point::Affine(x, y));
            }
        }
    }
}

#[test]
fn multiplication_formula_matches_repeated_addition() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    for _ in 0..100 {
        let (e, p) = random_curve_point(&mut rng);
        let mut acc = Point::Infinity;
        for m in 1..=12i64 {
            acc = e.add(&acc, &p).unwrap();
            if mul_by_m_formula(&e, &p, m).unwrap() != acc {
                mismatches += 1;
            }
            assert_eq!(e.mul_i64(m, &p).unwrap(), acc);
        }
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn repeated_addition_over_f101() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let f = PrimeField::new(101);
    let e = Curve::short(f, 3, 7);
    let mut found = 0;
    while found < 20 {
        let x = rng.gen_range(0..101u64);
        let rhs = f.add(&f.add(&f.pow(&x, 3), &f.mul(&3, &x)), &7);
        let Some(y) = f.sqrt(rhs) else { continue };
        let p = Point::Affine(x, y);
        let mut acc = Point::Infinity;
        for _ in 0..7 {
            acc = e.add(&acc, &p).unwrap();
        }
        assert_eq!(e.mul_i64(7, &p).unwrap(), acc);
        assert_eq!(e.add(&p, &Point::Infinity).unwrap(), p);
        assert_eq!(e.add(&p, &e.neg(&p)).unwrap(), Point::Infinity);
        found += 1;
    }
}

#[test]
fn three_torsion_over_f7_maps_to_infinity() {
    let f = PrimeField::new(7);
    let mut seen = 0;
    for a in 0..7u64 {
        for b in 0..7u64 {
            if f.add(&f.mul_i64(&f.pow(&a, 3), 4), &f.mul_i64(&f.mul(&b, &b), 27)) == 0 {
                continue;
            }
            let e = Curve::short(f, a, b);
            for x in 0..7u64 {
                for y in 0..7u64 {
                    let p = Point::Affine(x, y);
                    if !e.on_curve(&p) {
                        continue;
                    }
                    // brute force: 3P = O by repeated addition
                    let three = e.add(&e.add(&p, &p).unwrap(), &p).unwrap();
                    if three.is_infinity() {
                        seen += 1;
                        assert_eq!(mul_by_m_formula(&e, &p, 3).unwrap(), Point::Infinity);
                    } else {
                        assert_eq!(mul_by_m_formula(&e, &p, 3).unwrap(), three);
                    }
                }
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn psi3_symbolic() {
    let z = ZAB;
    let r = PolyRing::new(z);
    let d = division_polys(&r, &z.a(), &z.b(), 3).unwrap();
    let want = vec![z.from_terms(&[(-1, 2, 0)]), z.from_terms(&[(12, 0, 1)]), z.from_terms(&[(6, 1, 0)]), z.zero(), z.from_i64(3)];
    assert_eq!(d.psi, want);
    assert!(!d.psi_has_y);
}

#[test]
fn phi3_symbolic_against_direct_expansion() {
    let z = ZAB;
    let r = PolyRing::new(z);
    let d = division_polys(&r, &z.a(), &z.b(), 3).unwrap();
    // x psi_3^2 - psi_4 psi_2 with psi_2 psi_4 = 2 y^2 P_4 = 2 f P_4
    let x = r.x();
    let f = r.from_coeffs(vec![z.b(), z.a(), z.zero(), z.one()]);
    let p3 = r.from_coeffs(vec![z.from_terms(&[(-1, 2, 0)]), z.from_terms(&[(12, 0, 1)]), z.from_terms(&[(6, 1, 0)]), z.zero(), z.from_i64(3)]);
    let p4 = r.from_coeffs(vec![
        z.from_terms(&[(-32, 0, 2), (-4, 3, 0)]),
        z.from_terms(&[(-16, 1, 1)]),
        z.from_terms(&[(-20, 2, 0)]),
        z.from_terms(&[(80, 0, 1)]),
        z.from_terms(&[(20, 1, 0)]),
        z.zero(),
        z.from_i64(4),
    ]);
    let direct = r.sub(&r.mul(&x, &r.square(&p3)), &r.mul_i64(&r.mul(&f, &p4), 2));
    assert_eq!(d.phi, direct);
    let expanded = r.from_coeffs(vec![
        z.from_terms(&[(8, 3, 1), (64, 0, 3)]),
        z.from_terms(&[(9, 4, 0), (96, 1, 2)]),
        z.from_terms(&[(48, 2, 1)]),
        z.from_terms(&[(36, 3, 0), (48, 0, 2)]),
        z.from_terms(&[(-24, 1, 1)]),
        z.from_terms(&[(30, 2, 0)]),
        z.from_terms(&[(-96, 0, 1)]),
        z.from_terms(&[(-12, 1, 0)]),
        z.zero(),
        z.one(),
    ]);
    assert_eq!(d.phi, expanded);
}

#[test]
fn division_polynomials_over_z_specialize() {
    // evaluating the symbolic phi_m at A, B agrees with the rational computation
    let z = ZAB;
    let r = PolyRing::new(z);
    let q = PolyRing::new(Rationals);
    let (a, b) = (Rational::from((-7, 3)), Rational::from((107, 108)));
    for m in 1..=6 {
        let sym = division_polys(&r, &z.a(), &z.b(), m).unwrap();
        let num = division_polys(&q, &a, &b, m).unwrap();
        let spec: Vec<Rational> = sym
            .phi
            .iter()
            .map(|c| {
                c.iter().fold(Rational::new(), |acc, ((i, j), v)| {
                    acc + Rational::from(v.clone()) * a.clone().pow(*i as i32) * b.clone().pow(*j as i32)
                })
            })
            .collect();
        assert_eq!(q.from_coeffs(spec), num.phi);
    }
}

proptest! {
    #[test]
    fn group_law_associative(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (e, p) = random_curve_point(&mut rng);
        let q = e.mul_i64(rng.gen_range(2..50), &p).unwrap();
        let r = e.mul_i64(rng.gen_range(2..50), &p).unwrap();
        let lhs = e.add(&e.add(&p, &q).unwrap(), &r).unwrap();
        let rhs = e.add(&p, &e.add(&q, &r).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn group_law_associative_over_q(i in 1i64..6, j in 1i64..6, k in 1i64..6) {
        let e = CurveDb::builtin().get("389A1").unwrap().over_q();
        let p = Point::Affine(Rational::from(0), Rational::from(0));
        let q = Point::Affine(Rational::from(-1), Rational::from(1));
        let a = e.mul_i64(i, &p).unwrap();
        let b = e.mul_i64(j, &q).unwrap();
        let c = e.add(&e.mul_i64(k, &p).unwrap(), &q).unwrap();
        let lhs = e.add(&e.add(&a, &b).unwrap(), &c).unwrap();
        let rhs = e.add(&a, &e.add(&b, &c).unwrap()).unwrap();
        prop_assert!(e.on_curve(&lhs));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn integer_embedding_in_prime_fields() {
    let f = PrimeField::new(10_007);
    let big = Integer::from(10_007u64).pow(3) * 5 + 17;
    assert_eq!(f.from_integer(&big), 17);
    assert_eq!(f.from_integer(&Integer::from(-1)), 10_006);
}

