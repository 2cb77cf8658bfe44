//! Group law on a general Weierstrass curve over an exact field.

use crate::ring::{ArithError, Field};
use rug::Integer;

#[derive(Clone, Debug, PartialEq)]
pub enum Point<E> {
    Infinity,
    Affine(E, E),
}

impl<E: Clone> Point<E> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&E> {
        match self {
            Point::Affine(x, _) => Some(x),
            Point::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&E> {
        match self {
            Point::Affine(_, y) => Some(y),
            Point::Infinity => None,
        }
    }
}

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over the field `field`.
#[derive(Clone, Debug)]
pub struct Curve<F: Field> {
    pub field: F,
    pub a: [F::Elem; 5],
}

impl<F: Field> Curve<F> {
    pub fn new(field: F, a: [F::Elem; 5]) -> Self {
        Curve { field, a }
    }

    pub fn short(field: F, a4: F::Elem, a6: F::Elem) -> Self {
        let z = field.zero();
        Curve { a: [z.clone(), z.clone(), z, a4, a6], field }
    }

    /// Left side minus right side of the equation at (x, y).
    pub fn equation(&self, x: &F::Elem, y: &F::Elem) -> F::Elem {
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = &self.a;
        let lhs = f.add(&f.mul(y, y), &f.mul(y, &f.add(&f.mul(a1, x), a3)));
        let x2 = f.mul(x, x);
        let rhs = f.add(&f.add(&f.mul(&x2, x), &f.mul(a2, &x2)), &f.add(&f.mul(a4, x), a6));
        f.sub(&lhs, &rhs)
    }

    pub fn on_curve(&self, p: &Point<F::Elem>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => self.field.is_zero(&self.equation(x, y)),
        }
    }

    pub fn neg(&self, p: &Point<F::Elem>) -> Point<F::Elem> {
        let f = &self.field;
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let t = f.add(&f.mul(&self.a[0], x), &self.a[2]);
                Point::Affine(x.clone(), f.neg(&f.add(y, &t)))
            }
        }
    }

    pub fn add(&self, p: &Point<F::Elem>, q: &Point<F::Elem>) -> Result<Point<F::Elem>, ArithError> {
        let f = &self.field;
        let [a1, a2, a3, a4, _] = &self.a;
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return Ok(q.clone()),
            (_, Point::Infinity) => return Ok(p.clone()),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if f.eq(x1, x2) {
            // x1 = x2 means Q = P or Q = -P; the tangent denominator is y1 + y2 + a1 x + a3
            let den = f.add(&f.add(&f.add(y1, y2), &f.mul(a1, x1)), a3);
            if f.is_zero(&den) {
                return Ok(Point::Infinity);
            }
            let num = f.sub(&f.add(&f.add(&f.mul_i64(&f.mul(x1, x1), 3), &f.mul_i64(&f.mul(a2, x1), 2)), a4), &f.mul(a1, y1));
            f.div(&num, &den)?
        } else {
            f.div(&f.sub(y2, y1), &f.sub(x2, x1))?
        };
        let nu = f.sub(y1, &f.mul(&lambda, x1));
        let x3 = f.sub(&f.sub(&f.sub(&f.add(&f.mul(&lambda, &lambda), &f.mul(a1, &lambda)), a2), x1), x2);
        let y3 = f.sub(&f.neg(&f.add(&f.mul(&f.add(&lambda, a1), &x3), &nu)), a3);
        Ok(Point::Affine(x3, y3))
    }

    pub fn sub(&self, p: &Point<F::Elem>, q: &Point<F::Elem>) -> Result<Point<F::Elem>, ArithError> {
        self.add(p, &self.neg(q))
    }

    pub fn double(&self, p: &Point<F::Elem>) -> Result<Point<F::Elem>, ArithError> {
        self.add(p, p)
    }

    /// n P by double-and-add.
    pub fn mul(&self, n: &Integer, p: &Point<F::Elem>) -> Result<Point<F::Elem>, ArithError> {
        let base = if *n < 0 { self.neg(p) } else { p.clone() };
        let k = Integer::from(n.abs_ref());
        let mut acc = Point::Infinity;
        for i in (0..k.significant_bits()).rev() {
            acc = self.double(&acc)?;
            if k.get_bit(i) {
                acc = self.add(&acc, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn mul_i64(&self, n: i64, p: &Point<F::Elem>) -> Result<Point<F::Elem>, ArithError> {
        self.mul(&Integer::from(n), p)
    }
}
