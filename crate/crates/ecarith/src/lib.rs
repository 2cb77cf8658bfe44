//! Exact elliptic-curve arithmetic: rings and fields, the group law, Frobenius traces
//! and division polynomials.

pub mod ap;
pub mod curve;
pub mod divpoly;
pub mod numth;
pub mod point;
pub mod poly;
pub mod ring;
pub mod symbolic;

pub use ap::{an_coeffs, ap_count};
pub use curve::{to_short_weierstrass, to_short_weierstrass_integral, CurveData, CurveDb, CurveError, ShortWeierstrass};
pub use divpoly::{division_polys, mul_by_m_formula, DivPolyError, DivisionPolys};
pub use point::{Curve, Point};
pub use poly::{Poly, PolyRing};
pub use ring::{ArithError, Field, Integers, PrimeField, Rationals, Ring};
