//! Multiprecision kernel: MPFR-backed real and complex numbers, midpoint-radius balls,
//! exact integral LLL and recognition of rationals and algebraic numbers.

pub mod ball;
pub mod complex;
pub mod cpoly;
pub mod lll;
pub mod recognize;

pub use ball::Ball;
pub use complex::{digits_to_bits, pi, BigComplex};
pub use lll::{is_lll_reduced, lll_reduce, IntLattice, LatticeError};
pub use recognize::{algdep, rational_reconstruct, round_to_integer, RationalApprox};

pub use rug;

/// Real multiprecision float; the precision travels with the value.
pub type BigFloat = rug::Float;

/// Working precision used when nothing better is known, in decimal digits.
pub const DEFAULT_DIGITS: u32 = 256;
