use mpkernel::{algdep, cpoly, is_lll_reduced, lll_reduce, rational_reconstruct, BigComplex, IntLattice};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

// Row-style Hermite normal form of a full-rank square integer matrix.
fn hnf(mut m: Vec<Vec<Integer>>) -> Vec<Vec<Integer>> {
    let n = m.len();
    for col in 0..n {
        // Euclid down the column until only the pivot row is nonzero
        loop {
            let mut piv = None;
            for r in col..n {
                if m[r][col] != 0 && piv.is_none_or(|p: usize| m[r][col].clone().abs() < m[p][col].clone().abs()) {
                    piv = Some(r);
                }
            }
            let p = piv.expect("singular");
            m.swap(col, p);
            let mut done = true;
            for r in col + 1..n {
                if m[r][col] != 0 {
                    let q = m[r][col].clone().div_rem_floor(m[col][col].clone()).0;
                    let pivot_row = m[col].clone();
                    for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                        *x -= Integer::from(&q * y);
                    }
                    if m[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[col][col] < 0 {
            for x in m[col].iter_mut() {
                *x = Integer::from(-&*x);
            }
        }
        for r in 0..col {
            let q = m[r][col].clone().div_rem_floor(m[col][col].clone()).0;
            let pivot_row = m[col].clone();
            for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                *x -= Integer::from(&q * y);
            }
        }
    }
    m
}

fn to_int(rows: &[Vec<i64>]) -> Vec<Vec<Integer>> {
    rows.iter().map(|r| r.iter().map(|&x| Integer::from(x)).collect()).collect()
}

#[test]
fn lll_on_scrambled_basis_spans_same_lattice() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let base: Vec<Vec<i64>> = (0..5).map(|i| (0..5).map(|j| if i == j { rng.gen_range(1..20) } else { rng.gen_range(-9..10) }).collect()).collect();
        let mut scrambled = to_int(&base);
        // random unimodular row operations
        for _ in 0..30 {
            let a = rng.gen_range(0..5);
            let b = (a + rng.gen_range(1..5)) % 5;
            let k = Integer::from(rng.gen_range(-5i64..6));
            let rb = scrambled[b].clone();
            for (x, y) in scrambled[a].iter_mut().zip(&rb) {
                *x += Integer::from(&k * y);
            }
        }
        let lat = IntLattice::new(scrambled.clone()).unwrap();
        let red = lll_reduce(&lat, &Rational::from((99, 100))).unwrap();
        assert!(is_lll_reduced(&red, &Rational::from((99, 100))));
        assert_eq!(lat.gram_det().unwrap(), red.gram_det().unwrap());
        assert_eq!(hnf(scrambled), hnf(red.basis.clone()));
        assert_eq!(hnf(to_int(&base)), hnf(red.basis));
    }
}

#[test]
fn algdep_recovers_53a1_heegner_polynomial() {
    let prec = 400;
    let f: Vec<i64> = vec![864, -3852, 6930, -5855, 1980, -12, 1];
    let coeffs: Vec<BigComplex> = f.iter().map(|&c| BigComplex::from_i64(prec, c)).collect();
    let roots = cpoly::roots(&coeffs, prec);
    assert_eq!(roots.len(), 6);
    for z in &roots {
        let p = algdep(z, 6, 380).expect("relation");
        let expect: Vec<Integer> = f.iter().map(|&c| Integer::from(c)).collect();
        assert_eq!(p, expect);
    }
}

#[test]
fn rational_reconstruct_printed_coefficient() {
    let x = Float::with_val(200, -867) / 49u32;
    let r = rational_reconstruct(&x, &Integer::from(100_000)).unwrap();
    assert_eq!(r.value, Rational::from((-867, 49)));
}

#[test]
fn rational_reconstruct_pi_matches_brute_force() {
    let pi = Float::with_val(200, Constant::Pi);
    let got = rational_reconstruct(&pi, &Integer::from(10)).unwrap().value;
    // brute force: closest fraction with denominator at most 10
    let mut best = Rational::from(3);
    let mut bestd = Float::with_val(200, 1);
    for q in 1..=10i64 {
        for p in 0..=40i64 {
            let d = Float::with_val(200, &pi - Float::with_val(200, p) / q).abs();
            if d < bestd {
                bestd = d;
                best = Rational::from((p, q));
            }
        }
    }
    assert_eq!(got, best);
    assert_eq!(got, Rational::from((22, 7)));
}

proptest! {
    #[test]
    fn rational_round_trip(q in 1i64..5000, k in -4i64..4, r in 0i64..5000) {
        let bound = Integer::from(5000);
        let p = k * q + r % q;
        let bits = (2.0 * 5000f64.log2() + 4.0).ceil() as u32 + 1;
        let x = Float::with_val(bits, p) / Float::with_val(bits, q);
        let back = rational_reconstruct(&x, &bound).unwrap();
        prop_assert_eq!(back.value, Rational::from((p, q)));
    }

    #[test]
    fn algdep_candidates_meet_threshold(a in 2i64..50, b in -20i64..20) {
        // z = b + sqrt(a), exact relation x^2 - 2bx + b^2 - a
        let prec = 256u32;
        let z = BigComplex::from_real(Float::with_val(prec, a).sqrt() + b);
        if let Some(p) = algdep(&z, 2, 240) {
            let mut acc = Float::with_val(prec, 0);
            for c in p.iter().rev() {
                acc = acc * &z.re + Float::with_val(prec, c);
            }
            let cmax = p.iter().map(|c| c.clone().abs()).max().unwrap();
            let bound = Float::with_val(prec, 2).pow(-120i32) * Float::with_val(prec, &cmax);
            prop_assert!(acc.abs() < bound);
        }
    }
}

