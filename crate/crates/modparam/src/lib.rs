//! Complex-analytic side of the Heegner point computation: period lattices, the
//! Weierstrass functions, the modular parametrization and recognition of exact
//! coordinates of y_c in K[c].

pub mod cache;
pub mod heegner;
pub mod lattice;
pub mod phi;

pub use cache::{load_record, parse_record, record_to_text, save_record_atomic};
pub use heegner::{
    heegner_embeddings, heegner_point, irreducibility_witness, recognize, trace_to_k, Embeddings, HeegnerOptions, HeegnerRecord,
    Irreducibility,
};
pub use lattice::{curve_lattice, eisenstein_invariants, elliptic_log, period_lattice, weierstrass_p, PeriodLattice};
pub use phi::{phi_tau, required_terms, tail_bound, ModularImage};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("curve is singular")]
    Singular,
    #[error("AGM did not converge at {0} bits")]
    AgmDiverged(u32),
    #[error("lattice invariants disagree with the curve (relative residual {0:e})")]
    LatticeMismatch(f64),
    #[error("z is a lattice point at working precision")]
    Pole,
    #[error("tau is not in the upper half plane")]
    NotInUpperHalfPlane,
    #[error("need a_n up to n_max = {required}, only {supplied} supplied")]
    TooFewCoefficients { required: usize, supplied: usize },
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("recognition failed at {0} bits; retry with doubled precision")]
    NeedPrecision(u32),
    #[error("recognition failed after {0} precision doublings")]
    RetriesExhausted(u32),
    #[error("no root of the curve equation in K[c]: {0}")]
    Inconsistent(String),
    #[error("class group: {0}")]
    Class(#[from] classgroup::ClassError),
    #[error("ring class field: {0}")]
    Ring(#[from] ringclass::RingError),
    #[error("trace does not lie in K")]
    NotOverK,
    #[error("cache: {0}")]
    Cache(String),
}
