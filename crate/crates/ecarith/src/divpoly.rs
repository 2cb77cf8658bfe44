//! Division polynomials of y^2 = x^3 + Ax + B, kept as polynomials in x.
//!
//! psi_m is P_m for odd m and y P_m for even m; omega_m is W_m for even m
//! and y W_m for odd m. Squares of y are replaced by f = x^3 + Ax + B.

use crate::point::{Curve, Point};
use crate::poly::{Poly, PolyRing};
use crate::ring::{ArithError, Field, Ring};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DivPolyError {
    #[error("multiplier must be positive, got {0}")]
    BadMultiplier(i64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivisionPolys<E> {
    pub m: u64,
    /// x-part of psi_m; the full psi_m carries a factor y when m is even.
    pub psi: Poly<E>,
    pub psi_has_y: bool,
    /// psi_m^2 as a polynomial in x.
    pub psi_sq: Poly<E>,
    pub phi: Poly<E>,
    /// x-part of omega_m; the full omega_m carries a factor y when m is odd.
    pub omega: Poly<E>,
    pub omega_has_y: bool,
}

/// The x-parts P_0 .. P_{n} over the given coefficient ring.
pub fn psi_table<R: Ring>(ring: &PolyRing<R>, a: &R::Elem, b: &R::Elem, n: usize) -> Vec<Poly<R::Elem>> {
    let k = &ring.base;
    let f = ring.from_coeffs(vec![b.clone(), a.clone(), k.zero(), k.one()]);
    let f2 = ring.mul(&f, &f);
    let a2 = k.mul(a, a);
    let mut p: Vec<Poly<R::Elem>> = vec![
        ring.zero(),
        ring.one(),
        ring.from_i64(2),
        ring.from_coeffs(vec![k.neg(&a2), k.mul_i64(b, 12), k.mul_i64(a, 6), k.zero(), k.from_i64(3)]),
    ];
    // 4 (x^6 + 5A x^4 + 20B x^3 - 5A^2 x^2 - 4AB x - 8B^2 - A^3)
    let ab = k.mul(a, b);
    let c0 = k.neg(&k.add(&k.mul_i64(&k.mul(b, b), 8), &k.mul(&a2, a)));
    let p4 = ring.from_coeffs(vec![
        c0,
        k.mul_i64(&ab, -4),
        k.mul_i64(&a2, -5),
        k.mul_i64(b, 20),
        k.mul_i64(a, 5),
        k.zero(),
        k.one(),
    ]);
    p.push(ring.mul_i64(&p4, 4));
    for idx in 5..=n {
        let m = idx / 2;
        let next = if idx % 2 == 1 {
            let t1 = ring.mul(&p[m + 2], &ring.pow(&p[m], 3));
            let t2 = ring.mul(&p[m - 1], &ring.pow(&p[m + 1], 3));
            if m % 2 == 0 {
                ring.sub(&ring.mul(&f2, &t1), &t2)
            } else {
                ring.sub(&t1, &ring.mul(&f2, &t2))
            }
        } else {
            let inner = ring.sub(
                &ring.mul(&p[m + 2], &ring.square(&p[m - 1])),
                &ring.mul(&p[m - 2], &ring.square(&p[m + 1])),
            );
            ring.div_exact_i64(&ring.mul(&p[m], &inner), 2)
        };
        p.push(next);
    }
    p.truncate(n + 1);
    p
}

/// psi_m, phi_m, omega_m of y^2 = x^3 + Ax + B.
pub fn division_polys<R: Ring>(ring: &PolyRing<R>, a: &R::Elem, b: &R::Elem, m: i64) -> Result<DivisionPolys<R::Elem>, DivPolyError> {
    if m <= 0 {
        return Err(DivPolyError::BadMultiplier(m));
    }
    let mu = m as usize;
    let k = &ring.base;
    let t = psi_table(ring, a, b, (mu + 2).max(4));
    let f = ring.from_coeffs(vec![b.clone(), a.clone(), k.zero(), k.one()]);
    let x = ring.x();
    let even = mu.is_multiple_of(2);
    let psi = t[mu].clone();
    let psi_sq = if even { ring.mul(&f, &ring.square(&psi)) } else { ring.square(&psi) };
    let (prev, next) = (&t[mu - 1], &t[mu + 1]);
    let phi = if even {
        ring.sub(&ring.mul(&x, &psi_sq), &ring.mul(next, prev))
    } else {
        ring.sub(&ring.mul(&x, &psi_sq), &ring.mul(&f, &ring.mul(next, prev)))
    };
    // P_{-1} = -1
    let before = if mu >= 2 { t[mu - 2].clone() } else { ring.from_i64(-1) };
    let inner = ring.sub(&ring.mul(&t[mu + 2], &ring.square(prev)), &ring.mul(&before, &ring.square(next)));
    let omega = ring.div_exact_i64(&inner, 4);
    Ok(DivisionPolys { m: m as u64, psi, psi_has_y: even, psi_sq, phi, omega, omega_has_y: !even })
}

/// m P on a short curve via (phi_m / psi_m^2, omega_m / psi_m^3).
pub fn mul_by_m_formula<F: Field>(curve: &Curve<F>, p: &Point<F::Elem>, m: i64) -> Result<Point<F::Elem>, ArithError> {
    let k = &curve.field;
    let Point::Affine(x, y) = p else { return Ok(Point::Infinity) };
    if m == 0 {
        return Ok(Point::Infinity);
    }
    if m < 0 {
        let q = mul_by_m_formula(curve, p, -m)?;
        return Ok(curve.neg(&q));
    }
    let ring = PolyRing::new(k.clone());
    let d = division_polys(&ring, &curve.a[3], &curve.a[4], m).expect("positive multiplier");
    let psi_x = ring.eval(&d.psi, x);
    let psi = if d.psi_has_y { k.mul(&psi_x, y) } else { psi_x };
    if k.is_zero(&psi) {
        return Ok(Point::Infinity);
    }
    let psi2 = k.mul(&psi, &psi);
    let w_x = ring.eval(&d.omega, x);
    let w = if d.omega_has_y { k.mul(&w_x, y) } else { w_x };
    let xm = k.div(&ring.eval(&d.phi, x), &psi2)?;
    let ym = k.div(&w, &k.mul(&psi2, &psi))?;
    Ok(Point::Affine(xm, ym))
}
