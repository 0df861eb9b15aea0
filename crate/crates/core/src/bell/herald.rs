use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{BellError, DetectorModel, Result};
use crate::fock::{ModeSystem, PureState};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeraldOutcome {
    Click,
    NoClick,
    /// No heralding detector in the experiment.
    None,
}

/// The heralding measurement on the auxiliary mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeraldSpec {
    mode: usize,
    p_min: f64,
    detector: DetectorModel,
}

impl HeraldSpec {
    pub const DEFAULT_P_MIN: f64 = 1e-4;
    pub const EXTENDED_P_MIN: f64 = 1e-9;

    pub fn new(p_min: f64, detector: DetectorModel) -> Result<Self> {
        Self::on_mode(ModeSystem::HERALD, p_min, detector)
    }

    pub fn on_mode(mode: usize, p_min: f64, detector: DetectorModel) -> Result<Self> {
        if !(p_min > 0.0 && p_min < 1.0) {
            return Err(BellError::InvalidPMin(p_min));
        }
        Ok(Self { mode, p_min, detector })
    }

    pub fn mode(&self) -> usize {
        self.mode
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    pub fn detector(&self) -> &DetectorModel {
        &self.detector
    }

    pub fn check(&self, system: &ModeSystem) -> Result<()> {
        if system.herald_mode() != Some(self.mode) {
            return Err(BellError::HeraldModeMismatch { mode: self.mode, expected: system.herald_mode() });
        }
        Ok(())
    }
}

impl Default for HeraldSpec {
    fn default() -> Self {
        Self { mode: ModeSystem::HERALD, p_min: Self::DEFAULT_P_MIN, detector: DetectorModel::perfect() }
    }
}

/// A unit-trace density operator on `m` truncated modes.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    d: usize,
    m: usize,
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn from_pure(state: &PureState) -> Self {
        let v = state.to_vector();
        let matrix = &v * v.adjoint();
        Self { d: state.d(), m: state.n(), matrix }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Probability of each joint outcome when every mode is measured with a
    /// POVM diagonal in the Fock basis. `weights[mode][level]` is the POVM
    /// element's diagonal for that mode.
    pub fn diagonal_expectation(&self, weights: &[&[f64]]) -> f64 {
        assert_eq!(weights.len(), self.m);
        let dim = self.matrix.nrows();
        (0..dim)
            .map(|i| {
                let mut w = 1.0;
                let mut rest = i;
                for mode in (0..self.m).rev() {
                    w *= weights[mode][rest % self.d];
                    rest /= self.d;
                }
                w * self.matrix[(i, i)].re
            })
            .sum()
    }
}

/// One heralding outcome with its probability and the conditional state of
/// the remaining modes.
#[derive(Debug, Clone)]
pub struct HeraldBranch {
    pub state: DensityOperator,
    pub probability: f64,
    pub outcome: HeraldOutcome,
}

/// `Tr_h[(1 (x) P_O) |psi><psi|]` without normalization; the herald is the last mode.
fn partial_conditional(state: &PureState, weights: &[f64]) -> DMatrix<C64> {
    let d = state.d();
    let rest = d.pow((state.n() - 1) as u32);
    let amps = state.amplitudes();
    DMatrix::from_fn(rest, rest, |i, j| (0..d).map(|k| amps[i * d + k] * amps[j * d + k].conj() * weights[k]).sum())
}

/// Measures the herald mode and returns every outcome with nonzero
/// probability together with the normalized state of the other modes.
pub fn herald(state: &PureState, spec: &HeraldSpec) -> Result<Vec<HeraldBranch>> {
    if spec.mode() + 1 != state.n() {
        return Err(BellError::HeraldModeMismatch { mode: spec.mode(), expected: Some(state.n() - 1) });
    }
    let norm = state.norm();
    if norm == 0.0 {
        return Err(BellError::ZeroNorm);
    }
    let d = state.d();
    let det = spec.detector();
    let mut out = Vec::with_capacity(2);
    for (outcome, weights) in
        [(HeraldOutcome::Click, det.click_weights(d)), (HeraldOutcome::NoClick, det.no_click_weights(d))]
    {
        let unnormalized = partial_conditional(state, &weights);
        let probability = unnormalized.trace().re / (norm * norm);
        if probability > 0.0 {
            let trace = unnormalized.trace().re;
            out.push(HeraldBranch {
                state: DensityOperator { d, m: state.n() - 1, matrix: unnormalized / C64::new(trace, 0.0) },
                probability,
                outcome,
            });
        }
    }
    Ok(out)
}

/// Discards the last mode without conditioning on it.
pub fn trace_out_herald(state: &PureState) -> Result<DensityOperator> {
    let norm = state.norm();
    if norm == 0.0 {
        return Err(BellError::ZeroNorm);
    }
    let ones = vec![1.0; state.d()];
    let rho = partial_conditional(state, &ones);
    let trace = rho.trace().re;
    Ok(DensityOperator { d: state.d(), m: state.n() - 1, matrix: rho / C64::new(trace, 0.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_setup, simplify_setup, Element, TruncationConfig};

    #[test]
    fn vacuum_never_clicks() {
        let branches = herald(&PureState::vacuum(4, 3), &HeraldSpec::default()).unwrap();
        assert_eq!(branches.len(), 1);
        let b = &branches[0];
        assert_eq!(b.outcome, HeraldOutcome::NoClick);
        assert_eq!(b.probability, 1.0);
        assert_eq!(b.state.matrix()[(0, 0)].re, 1.0);
        assert!((b.state.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn heralded_single_photon_from_two_mode_squeezing() {
        let setup = simplify_setup(&[Element::two_mode_squeezer(1, 2).unwrap()]);
        let g: f64 = 0.1;
        let psi = apply_setup(&setup, &[g], (0, 0), &TruncationConfig::default(), &ModeSystem::heralded()).unwrap();
        let branches = herald(&psi, &HeraldSpec::default()).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let click = branches.iter().find(|b| b.outcome == HeraldOutcome::Click).unwrap();
        assert!((click.probability - g.tanh().powi(2)).abs() < 2e-3);
        // |0>_A |1>_B sits at index 0 * d + 1
        assert!(click.state.matrix()[(1, 1)].re >= 0.99);
    }

    #[test]
    fn rejects_zero_state_and_wrong_mode() {
        let zero = PureState::from_amplitudes(2, 3, vec![C64::new(0.0, 0.0); 8]).unwrap();
        assert!(matches!(herald(&zero, &HeraldSpec::default()), Err(BellError::ZeroNorm)));
        assert!(matches!(
            herald(&PureState::vacuum(4, 2), &HeraldSpec::default()),
            Err(BellError::HeraldModeMismatch { .. })
        ));
        assert!(HeraldSpec::new(0.0, DetectorModel::perfect()).is_err());
        assert!(HeraldSpec::new(1.0, DetectorModel::perfect()).is_err());
    }
}
