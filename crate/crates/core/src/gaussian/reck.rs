use nalgebra::DMatrix;

use super::{DecompositionPlan, GaussianError, Layer, PlanEntry, Result, UNITARITY_TOL};
use crate::fock::ElementKind;
use crate::C64;

/// Mode-space matrix `U` of a passive linear-optics network,
/// `a_k -> U_kl a_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOpticsUnitary(DMatrix<C64>);

impl LinearOpticsUnitary {
    pub fn new(u: DMatrix<C64>) -> Result<Self> {
        if !u.is_square() {
            return Err(GaussianError::Shape(format!("{:?} is not square", u.shape())));
        }
        let r = unitarity_residual(&u);
        if !(r <= UNITARITY_TOL) {
            return Err(GaussianError::NotUnitary(r));
        }
        Ok(Self(u))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }
}

pub(crate) fn unitarity_residual(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    let a = u * u.adjoint() - DMatrix::<C64>::identity(n, n);
    let b = u.adjoint() * u - DMatrix::<C64>::identity(n, n);
    a.iter().chain(b.iter()).map(|z| z.norm()).fold(0.0, f64::max)
}

/// Triangular beam-splitter and phase-shifter mesh for `U`.
///
/// Column by column, entries below the diagonal are nulled from the bottom
/// up by a phase on the upper row followed by a beam splitter between
/// neighbouring rows. What remains is diagonal and becomes the first layer
/// of phase shifters. The plan lists entries in application order.
pub fn reck_decompose(u: &LinearOpticsUnitary) -> DecompositionPlan {
    let n = u.n();
    let mut x = u.matrix().clone();
    // (row pair top index, theta, phi) in nulling order.
    let mut steps = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for c in 0..n.saturating_sub(1) {
        for r in (c + 1..n).rev() {
            let a = x[(r - 1, c)];
            let b = x[(r, c)];
            let phi = b.arg() - a.arg();
            let theta = b.norm().atan2(a.norm());
            let phase = C64::from_polar(1.0, phi);
            let (s, co) = theta.sin_cos();
            for k in 0..n {
                let top = x[(r - 1, k)] * phase;
                let bottom = x[(r, k)];
                x[(r - 1, k)] = top * co + bottom * s;
                x[(r, k)] = -top * s + bottom * co;
            }
            steps.push((r - 1, theta, phi));
        }
    }
    let mut entries = Vec::with_capacity(n * (n + 1) / 2 + steps.len());
    for m in 0..n {
        entries.push(PlanEntry::new(ElementKind::PhaseShifter, vec![m], x[(m, m)].arg(), Layer::Phases));
    }
    for &(top, theta, phi) in steps.iter().rev() {
        entries.push(PlanEntry::new(ElementKind::BeamSplitter, vec![top, top + 1], theta, Layer::Mesh));
        entries.push(PlanEntry::new(ElementKind::PhaseShifter, vec![top], -phi, Layer::Mesh));
    }
    DecompositionPlan { n, entries }
}
