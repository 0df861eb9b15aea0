//! Design of photonic Bell tests.
//!
//! The crate simulates optical setups on truncated Fock spaces ([`fock`]),
//! scores them with the CHSH expression under click/no-click detection
//! ([`bell`]), tunes element parameters by simulated annealing ([`anneal`]),
//! chooses setup structure with a projective-simulation agent ([`agent`]), and
//! orchestrates complete learning runs ([`harness`]). [`gaussian`] holds the
//! mode-space toolkit for Bogolyubov transformations.

pub mod agent;
pub mod anneal;
pub mod bell;
pub mod fock;
pub mod gaussian;
pub mod harness;

pub use num_complex::Complex64 as C64;
