//! Click/no-click detection, heralding and the CHSH score of a setup.
//!
//! Outcomes are labeled `no click -> +1` and `click -> -1` on both sides.

mod chsh;
mod detector;
mod evaluate;
mod herald;

pub use chsh::{chsh_score, CorrelationTable, TSIRELSON};
pub use detector::DetectorModel;
pub use evaluate::{
    evaluate_joint_oracle, evaluate_setup, joint_outcome_probabilities, ChshEvaluator, ChshResult, Evaluation,
    JointProbabilities,
};
pub use herald::{herald, trace_out_herald, DensityOperator, HeraldBranch, HeraldOutcome, HeraldSpec};

use thiserror::Error;

use crate::fock::FockError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BellError {
    #[error("detection efficiency must lie in [0, 1], got {0}")]
    InvalidEfficiency(f64),
    #[error("minimal herald probability must lie in (0, 1), got {0}")]
    InvalidPMin(f64),
    #[error("herald mode {mode} does not match the system (herald mode {expected:?})")]
    HeraldModeMismatch { mode: usize, expected: Option<usize> },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("state dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Fock(#[from] FockError),
}

pub type Result<T> = std::result::Result<T, BellError>;
