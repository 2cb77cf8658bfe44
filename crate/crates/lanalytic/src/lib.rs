//! Analytic side: theta series of ring class characters, Rankin L-functions
//! L(f x theta_chi, s) and their central derivatives, Zhang-formula heights,
//! direct canonical heights, and the precision planner for the Heegner pipeline.
//!
//! Numerics are double precision throughout; see `F64_DIGITS`.

pub mod height;
pub mod mellin;
pub mod plan;
pub mod rankin;
pub mod theta;

pub use height::{canonical_height_q, canonical_height_rcf, height_pairing_q, naive_height_rcf, petersson_from_degree, petersson_numeric};
pub use mellin::{gamma_factor, incomplete_mellin_g, inverse_mellin_phi, mellin_phi, MellinTable, PhiTable};
pub use plan::{
    convexity_height_bound, height_difference_bounds, precision_planner, CONVEXITY_CONSTANT, silverman_bounds, zhang_height, zhang_height_bound, HeightBound, PlaceData,
    ZhangComponent, ZhangTerm,
};
pub use rankin::{
    all_character_lseries, analytic_conductor, central_derivative, character_lseries, fe_residual, fe_tolerance, lambda_value, lambda_value_split,
    rankin_coeffs, rankin_local_factor, symmetry_residual, theta_function, CharacterLSeries, RankinLSeries,
};
pub use theta::{characters, primitive_character, theta_coeffs, Character, PrimitiveCharacter, ThetaSeries};

use thiserror::Error;

/// Decimal digits carried by the f64 evaluators; tolerances are stated against it.
pub const F64_DIGITS: u32 = 15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LError {
    #[error("domain: {0}")]
    Domain(String),
    #[error("not enough coefficients: need n_max >= {needed}")]
    InsufficientCoefficients { needed: usize },
    #[error("functional equation residual {residual:e} exceeds {tolerance:e}; ramified factor recipe suspect")]
    FunctionalEquation { residual: f64, tolerance: f64 },
    #[error("height component {index} is {value:e} < 0")]
    NegativeHeight { index: usize, value: f64 },
    #[error("missing local data: {0}")]
    MissingPlaceData(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parametrization: {0}")]
    Param(String),
}
