use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{BogolyubovTransform, GaussianError, Result};
use crate::fock::{Element, ElementKind, Setup};
use crate::C64;

/// Which part of a decomposition an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    /// Diagonal phases of a mesh.
    Phases,
    /// Beam splitters and their phases.
    Mesh,
    Squeezing,
    Displacement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanEntry {
    pub kind: ElementKind,
    /// 0-based modes.
    pub modes: Vec<usize>,
    pub value: f64,
    pub layer: Layer,
    /// Index of the factor (U, V, ...) the entry was produced for.
    pub stage: usize,
}

impl PlanEntry {
    pub fn new(kind: ElementKind, modes: Vec<usize>, value: f64, layer: Layer) -> Self {
        Self { kind, modes, value, layer, stage: 0 }
    }

    pub fn element(&self) -> Result<Element> {
        Ok(Element::new(self.kind, &self.modes, None)?)
    }
}

/// Elements in application order.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionPlan {
    pub n: usize,
    pub entries: Vec<PlanEntry>,
}

impl DecompositionPlan {
    pub fn empty(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn count(&self, kind: ElementKind) -> usize {
        self.entries.iter().filter(|e| e.kind == kind).count()
    }

    /// Appends `other`, tagging its entries with `stage`.
    pub fn extend_stage(&mut self, other: DecompositionPlan, stage: usize) {
        self.entries.extend(other.entries.into_iter().map(|mut e| {
            e.stage = stage;
            e
        }));
    }

    /// The plan as a runnable setup and its parameter vector.
    pub fn to_setup(&self) -> Result<(Setup, Vec<f64>)> {
        let elements = self.entries.iter().map(PlanEntry::element).collect::<Result<Vec<_>>>()?;
        let params = self.entries.iter().map(|e| e.value).collect();
        Ok((Setup::canonical(elements)?, params))
    }
}

/// Product of the mode-space matrices of a passive plan, last entry leftmost.
pub fn compose_plan(plan: &DecompositionPlan, n: usize) -> Result<DMatrix<C64>> {
    let mut u = DMatrix::<C64>::identity(n, n);
    for e in &plan.entries {
        if !matches!(e.kind, ElementKind::PhaseShifter | ElementKind::BeamSplitter) {
            return Err(GaussianError::UnsupportedKind(e.kind.short_name()));
        }
        let t = BogolyubovTransform::of_element(&e.element()?, e.value, n)?;
        u = t.f * u;
    }
    Ok(u)
}

/// Bogolyubov transform of an arbitrary plan.
pub fn compose_bogolyubov_plan(plan: &DecompositionPlan, n: usize) -> Result<BogolyubovTransform> {
    let mut t = BogolyubovTransform::identity(n);
    for e in &plan.entries {
        t = t.then(&BogolyubovTransform::of_element(&e.element()?, e.value, n)?)?;
    }
    Ok(t)
}
