//! Truncated multimode bosonic Fock spaces and the optical elements acting on them.
//!
//! A state of `n` modes truncated at `d` levels per mode is a vector of `d^n`
//! amplitudes. Mode 0 is the slowest-varying tensor factor, so the amplitude of
//! `|i_0, i_1, ..., i_{n-1}>` sits at index `sum_m i_m * d^(n-1-m)`.
//!
//! Mode roles are fixed: mode 0 belongs to Alice, mode 1 to Bob and mode 2, when
//! present, is the heralding mode.

mod element;
mod generator;
mod setup;
mod state;

pub use element::{Element, ElementKind, SettingTag};
pub use generator::{GeneratorTable, LocalGenerator, LocalUnitary};
pub use setup::{simplify_setup, Setup};
pub use state::{apply_setup, element_unitary, FockSimulator, PureState, SettingBranches};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("truncation dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("verification dimension {d_verify} is smaller than working dimension {d}")]
    InvalidVerifyDimension { d: usize, d_verify: usize },
    #[error("invalid mode system: {0}")]
    InvalidModeSystem(String),
    #[error("mode {mode} out of range for a {n}-mode system")]
    ModeOutOfRange { mode: usize, n: usize },
    #[error("{kind:?} acts on {expected} mode(s), got {got}")]
    WrongArity { kind: ElementKind, expected: usize, got: usize },
    #[error("two-mode element needs distinct modes, got {0} twice")]
    RepeatedMode(usize),
    #[error("setting tag {tag:?} cannot be carried by an element on modes {modes:?}")]
    SettingTagMismatch { tag: SettingTag, modes: Vec<usize> },
    #[error("element scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("parameter value is not finite: {0}")]
    NonFiniteValue(f64),
    #[error("expected {expected} parameters, got {got}")]
    ParamLengthMismatch { expected: usize, got: usize },
    #[error("setup is not in canonical form")]
    NonCanonicalSetup,
    #[error("state dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, FockError>;

/// Number of Fock levels kept per mode during search (`d`) and during the
/// re-verification of rewarded setups (`d_verify`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationConfig {
    d: usize,
    d_verify: usize,
}

impl TruncationConfig {
    pub const DEFAULT_D: usize = 4;
    pub const DEFAULT_D_VERIFY: usize = 11;

    pub fn new(d: usize, d_verify: usize) -> Result<Self> {
        if d < 2 {
            return Err(FockError::InvalidDimension(d));
        }
        if d_verify < d {
            return Err(FockError::InvalidVerifyDimension { d, d_verify });
        }
        Ok(Self { d, d_verify })
    }

    /// A configuration that works and verifies at the same dimension.
    pub fn single(d: usize) -> Result<Self> {
        Self::new(d, d)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn d_verify(&self) -> usize {
        self.d_verify
    }

    /// The configuration used for re-verification runs.
    pub fn verification(&self) -> Self {
        Self { d: self.d_verify, d_verify: self.d_verify }
    }
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self { d: Self::DEFAULT_D, d_verify: Self::DEFAULT_D_VERIFY }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeRole {
    Alice,
    Bob,
    Herald,
}

/// The modes of an experiment and who owns them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSystem {
    roles: Vec<ModeRole>,
}

impl ModeSystem {
    pub const ALICE: usize = 0;
    pub const BOB: usize = 1;
    pub const HERALD: usize = 2;

    /// Alice and Bob only.
    pub fn bipartite() -> Self {
        Self { roles: vec![ModeRole::Alice, ModeRole::Bob] }
    }

    /// Alice, Bob and a heralding mode.
    pub fn heralded() -> Self {
        Self { roles: vec![ModeRole::Alice, ModeRole::Bob, ModeRole::Herald] }
    }

    pub fn with_modes(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Self::bipartite()),
            3 => Ok(Self::heralded()),
            _ => Err(FockError::InvalidModeSystem(format!("supported mode counts are 2 and 3, got {n}"))),
        }
    }

    pub fn from_roles(roles: Vec<ModeRole>) -> Result<Self> {
        let expected = [ModeRole::Alice, ModeRole::Bob, ModeRole::Herald];
        if roles.len() < 2 || roles.len() > 3 || roles[..] != expected[..roles.len()] {
            return Err(FockError::InvalidModeSystem(format!(
                "roles must be [Alice, Bob] or [Alice, Bob, Herald], got {roles:?}"
            )));
        }
        Ok(Self { roles })
    }

    pub fn n(&self) -> usize {
        self.roles.len()
    }

    pub fn roles(&self) -> &[ModeRole] {
        &self.roles
    }

    pub fn role(&self, mode: usize) -> Option<ModeRole> {
        self.roles.get(mode).copied()
    }

    pub fn herald_mode(&self) -> Option<usize> {
        self.roles.iter().position(|r| *r == ModeRole::Herald)
    }

    pub fn has_herald(&self) -> bool {
        self.herald_mode().is_some()
    }

    pub fn hilbert_dim(&self, d: usize) -> usize {
        d.pow(self.n() as u32)
    }
}

/// Truncated annihilation operator: `<k-1| a |k> = sqrt(k)` for `k = 1..d-1`.
pub fn make_annihilation(d: usize) -> Result<DMatrix<C64>> {
    if d < 2 {
        return Err(FockError::InvalidDimension(d));
    }
    let mut a = DMatrix::zeros(d, d);
    for k in 1..d {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    Ok(a)
}
