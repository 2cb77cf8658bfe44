use ecarith::ring::{Field, Ring};
use ecarith::{Curve, Point};
use mpkernel::{cpoly, BigComplex};
use ringclass::*;
use rug::{Float, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn k53() -> RingClassField {
    let f = [864, -3852, 6930, -5855, 1980, -12, 1].map(Rational::from);
    RingClassField::from_rational(43, &f).unwrap()
}

fn printed_sigma(l: &RingClassField) -> Automorphism {
    let e = |u: Rational, v: Rational| QuadElem::new(u, v);
    let img = vec![
        e(q(18971815, 200165), q(-7453713, 200165)),
        e(q(-61171198, 400330), q(52833377, 400330)),
        e(q(102487877, 4803960), q(-767102463, 4803960)),
        e(q(34507457, 600495), q(40541607, 600495)),
        e(q(-614771, 2401980), q(-936861, 2401980)),
        e(q(47343, 1601320), q(54795, 1601320)),
    ];
    Automorphism { image_of_alpha: l.reduce(img), order: 6 }
}

#[test]
fn basic_field_operations() {
    let l = k53();
    let a = l.alpha();
    let ai = l.inv(&a).unwrap();
    assert_eq!(l.mul(&a, &ai), l.one());
    let a1 = l.add(&a, &l.one());
    assert_eq!(l.sub(&a1, &l.one()), a);
    assert!(l.inv(&l.zero()).is_err());
    // a random element times its inverse
    let e = l.reduce(vec![QuadElem::new(q(3, 7), q(-1, 2)), QuadElem::rational(q(5, 1)), QuadElem::new(q(0, 1), q(2, 9))]);
    assert_eq!(l.mul(&e, &l.inv(&e).unwrap()), l.one());
}

#[test]
fn norm_of_alpha_is_constant_term() {
    let l = k53();
    assert_eq!(l.norm_to_k(&l.alpha()), QuadElem::rational(q(864, 1)));
    // numerically: product of the complex roots
    let f: Vec<BigComplex> = [864, -3852, 6930, -5855, 1980, -12, 1].iter().map(|&c| BigComplex::from_i64(200, c)).collect();
    let roots = cpoly::roots(&f, 200);
    let mut prod = BigComplex::one(200);
    for r in &roots {
        prod = &prod * r;
    }
    assert!((prod.re.to_f64() - 864.0).abs() < 1e-30 && prod.im.to_f64().abs() < 1e-30);
}

#[test]
fn printed_generator_is_an_automorphism_of_order_six() {
    let l = k53();
    let s = printed_sigma(&l);
    assert!(s.is_root_of_f(&l));
    assert_eq!(automorphism_order(&l, &s.image_of_alpha, 12), Some(6));
    let id = Automorphism::identity(&l);
    assert_eq!(automorphism_order(&l, &id.image_of_alpha, 12), Some(1));
    // the six conjugates of alpha are distinct roots of F
    let mut imgs = vec![];
    for k in 0..6 {
        let g = s.pow(&l, k);
        assert!(g.is_root_of_f(&l));
        assert!(!imgs.contains(&g.image_of_alpha));
        imgs.push(g.image_of_alpha);
    }
    assert_eq!(s.pow(&l, 6).image_of_alpha, l.alpha());
}

#[test]
fn embeddings_follow_the_permutation() {
    // sigma(e) at one root equals e at the root sigma(alpha) lands on
    let l = k53();
    let s = printed_sigma(&l);
    let f: Vec<BigComplex> = [864, -3852, 6930, -5855, 1980, -12, 1].iter().map(|&c| BigComplex::from_i64(300, c)).collect();
    let roots = cpoly::roots(&f, 300);
    let e = l.reduce(vec![QuadElem::new(q(1, 3), q(2, 5)), QuadElem::rational(q(-4, 1)), QuadElem::new(q(0, 1), q(1, 1))]);
    let se = s.apply(&l, &e);
    let tol = Float::with_val(300, 1e-60);
    for r in &roots {
        let img = l.embed(&s.image_of_alpha, r);
        let j = roots.iter().position(|t| t.dist(&img) < tol).expect("image is a root");
        assert!(l.embed(&se, r).dist(&l.embed(&e, &roots[j])) < tol);
    }
}

#[test]
fn automorphisms_respect_the_group_law() {
    // points over K[5] built from a rational point of a curve
    let l = k53();
    let s = printed_sigma(&l);
    let c389 = curve_over(&l, &[0, 1, 1, -2, 0].map(rug::Integer::from));
    let p = Point::Affine(l.zero(), l.zero());
    let qp = Point::Affine(l.from_i64(-1), l.from_i64(1));
    let sum = c389.add(&p, &qp).unwrap();
    let sp = apply_aut(&c389, &p, &s).unwrap();
    let sq = apply_aut(&c389, &qp, &s).unwrap();
    assert_eq!(apply_aut(&c389, &sum, &s).unwrap(), c389.add(&sp, &sq).unwrap());
    // the trace of a rational point is 6 times it
    assert_eq!(trace_point(&c389, &p, &s).unwrap(), c389.mul_i64(6, &p).unwrap());
    let _: &Curve<RingClassField> = &c389;
}

#[test]
fn element_serialization_round_trip() {
    let l = k53();
    let s = printed_sigma(&l);
    let text = l.format_elem(&s.image_of_alpha);
    assert_eq!(l.parse_elem(&text), Some(s.image_of_alpha.clone()));
}
