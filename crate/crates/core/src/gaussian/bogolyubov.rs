use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{GaussianError, Result, BOGOLYUBOV_TOL};
use crate::fock::{Element, ElementKind};
use crate::C64;

/// Heisenberg image `a -> F a + H a^dagger + alpha` of a Gaussian unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct BogolyubovTransform {
    pub f: DMatrix<C64>,
    pub h: DMatrix<C64>,
    pub alpha: DVector<C64>,
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl BogolyubovTransform {
    pub fn new(f: DMatrix<C64>, h: DMatrix<C64>, alpha: DVector<C64>) -> Result<Self> {
        let n = f.nrows();
        if !f.is_square() || h.shape() != (n, n) || alpha.len() != n {
            return Err(GaussianError::Shape(format!("F {:?}, H {:?}, alpha {}", f.shape(), h.shape(), alpha.len())));
        }
        Ok(Self { f, h, alpha })
    }

    pub fn identity(n: usize) -> Self {
        Self { f: DMatrix::identity(n, n), h: DMatrix::zeros(n, n), alpha: DVector::zeros(n) }
    }

    pub fn linear(u: DMatrix<C64>) -> Self {
        let n = u.nrows();
        Self { f: u, h: DMatrix::zeros(n, n), alpha: DVector::zeros(n) }
    }

    /// Parallel single-mode squeezers with real amplitudes `g`.
    pub fn squeezers(g: &[f64]) -> Self {
        let n = g.len();
        let f = DMatrix::from_diagonal(&DVector::from_iterator(n, g.iter().map(|x| C64::from(x.cosh()))));
        let h = DMatrix::from_diagonal(&DVector::from_iterator(n, g.iter().map(|x| C64::from(x.sinh()))));
        Self { f, h, alpha: DVector::zeros(n) }
    }

    pub fn displacement(alpha: DVector<C64>) -> Self {
        let n = alpha.len();
        Self { f: DMatrix::identity(n, n), h: DMatrix::zeros(n, n), alpha }
    }

    pub fn n(&self) -> usize {
        self.f.nrows()
    }

    /// Mode-space image of one element with raw parameter `raw`.
    pub fn of_element(element: &Element, raw: f64, n: usize) -> Result<Self> {
        if let Some(&m) = element.modes().iter().find(|&&m| m >= n) {
            return Err(GaussianError::ModeOutOfRange { mode: m, n });
        }
        let v = element.scale() * raw;
        let m = element.modes();
        let mut t = Self::identity(n);
        match element.kind() {
            ElementKind::PhaseShifter => t.f[(m[0], m[0])] = C64::from_polar(1.0, v),
            ElementKind::DisplacementRe => t.alpha[m[0]] = C64::new(v, 0.0),
            ElementKind::DisplacementIm => t.alpha[m[0]] = C64::new(0.0, v),
            ElementKind::SingleModeSqueezerRe => {
                t.f[(m[0], m[0])] = C64::from(v.cosh());
                t.h[(m[0], m[0])] = C64::from(v.sinh());
            }
            ElementKind::SingleModeSqueezerIm => {
                t.f[(m[0], m[0])] = C64::from(v.cosh());
                t.h[(m[0], m[0])] = C64::new(0.0, v.sinh());
            }
            ElementKind::BeamSplitter => {
                let (s, c) = v.sin_cos();
                t.f[(m[0], m[0])] = C64::from(c);
                t.f[(m[0], m[1])] = C64::from(-s);
                t.f[(m[1], m[0])] = C64::from(s);
                t.f[(m[1], m[1])] = C64::from(c);
            }
            ElementKind::TwoModeSqueezer => {
                t.f[(m[0], m[0])] = C64::from(v.cosh());
                t.f[(m[1], m[1])] = C64::from(v.cosh());
                t.h[(m[0], m[1])] = C64::from(v.sinh());
                t.h[(m[1], m[0])] = C64::from(v.sinh());
            }
        }
        Ok(t)
    }

    /// The transform of applying `self` first and `next` afterwards.
    pub fn then(&self, next: &BogolyubovTransform) -> Result<Self> {
        if self.n() != next.n() {
            return Err(GaussianError::Shape(format!("{} vs {} modes", self.n(), next.n())));
        }
        let f = &next.f * &self.f + &next.h * self.h.conjugate();
        let h = &next.f * &self.h + &next.h * self.f.conjugate();
        let alpha = &next.f * &self.alpha + &next.h * self.alpha.conjugate() + &next.alpha;
        Ok(Self { f, h, alpha })
    }

    /// Largest entrywise difference to `other`.
    pub fn distance(&self, other: &BogolyubovTransform) -> f64 {
        let da = (&self.alpha - &other.alpha).iter().map(|z| z.norm()).fold(0.0, f64::max);
        max_abs(&(&self.f - &other.f)).max(max_abs(&(&self.h - &other.h))).max(da)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    /// Max-norm of `F F^dagger - H H^dagger - 1`.
    pub residual_i: f64,
    /// Max-norm of `F H^T - H F^T`.
    pub residual_ii: f64,
}

pub fn validate_bogolyubov(t: &BogolyubovTransform) -> ValidationReport {
    let n = t.n();
    let r1 = &t.f * t.f.adjoint() - &t.h * t.h.adjoint() - DMatrix::<C64>::identity(n, n);
    let r2 = &t.f * t.h.transpose() - &t.h * t.f.transpose();
    let (residual_i, residual_ii) = (max_abs(&r1), max_abs(&r2));
    ValidationReport { pass: residual_i <= BOGOLYUBOV_TOL && residual_ii <= BOGOLYUBOV_TOL, residual_i, residual_ii }
}
