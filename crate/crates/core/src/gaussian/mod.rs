//! Mode-space algebra of Gaussian elements: linear-optics meshes, Bogolyubov
//! transforms, the canonical `D V SMS U` form and parameter counting.

mod bogolyubov;
mod canonical;
mod count;
mod plan;
mod random;
mod reck;

pub use bogolyubov::{validate_bogolyubov, BogolyubovTransform, ValidationReport};
pub use canonical::{
    canonical_decompose, commute_displacement, commute_displacement_squeezing, CanonicalForm, StatePreparation,
};
pub use count::{chsh_count, parameter_count, Party};
pub use plan::{compose_bogolyubov_plan, compose_plan, DecompositionPlan, Layer, PlanEntry};
pub use random::{random_bogolyubov, random_unitary};
pub use reck::{reck_decompose, LinearOpticsUnitary};

use thiserror::Error;

use crate::fock::FockError;

/// Input gate for unitarity.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Gate for the two Bogolyubov constraints.
pub const BOGOLYUBOV_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("transform violates the commutation constraints (residuals {0:e}, {1:e})")]
    NotBogolyubov(f64, f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("mode {mode} out of range for {n} modes")]
    ModeOutOfRange { mode: usize, n: usize },
    #[error("element kind {0} has no mode-space form in this plan")]
    UnsupportedKind(&'static str),
    #[error("invalid party: {0}")]
    InvalidParty(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

pub type Result<T> = std::result::Result<T, GaussianError>;
