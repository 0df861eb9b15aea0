//! Simulated annealing over the parameter vector of a fixed setup.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bell::{ChshEvaluator, Evaluation, HeraldOutcome};
use crate::fock::Setup;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnnealError {
    #[error("iteration index must be at least 1")]
    ZeroIteration,
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("threshold must be finite")]
    NonFiniteThreshold,
    #[error("start point has {got} parameters, expected {expected}")]
    StartLength { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, AnnealError>;

/// Iteration budget `N(t) = base + slope * t` and temperatures
/// `T_i(t) = N(t) / i * t_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealSchedule {
    pub t_min: f64,
    pub base: u64,
    pub slope: u64,
    /// Half-width of the uniform step.
    pub xi: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self { t_min: 0.001, base: 95, slope: 5, xi: 0.25 }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min.is_finite()) {
            return Err(AnnealError::InvalidSchedule(format!("t_min = {}", self.t_min)));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(AnnealError::InvalidSchedule(format!("xi = {}", self.xi)));
        }
        if self.base + self.slope == 0 {
            return Err(AnnealError::InvalidSchedule("empty iteration budget".into()));
        }
        Ok(())
    }

    /// Total iterations allowed at trial `t`.
    pub fn iterations(&self, t: u64) -> u64 {
        self.base + self.slope * t
    }

    pub fn temperature(&self, i: u64, t: u64) -> Result<f64> {
        if i == 0 {
            return Err(AnnealError::ZeroIteration);
        }
        Ok(self.iterations(t) as f64 / i as f64 * self.t_min)
    }
}

/// Temperature of iteration `i` at trial `t` under the default schedule.
pub fn temperature(i: u64, t: u64) -> Result<f64> {
    AnnealSchedule::default().temperature(i, t)
}

/// Probability of undoing a move that scores `delta` below the best-so-far.
pub fn reversion_probability(delta: f64, temperature: f64) -> f64 {
    -(-delta / temperature).exp_m1()
}

/// Score of one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub value: f64,
    pub herald_outcome: Option<HeraldOutcome>,
    pub p_herald: Option<f64>,
}

impl From<f64> for Score {
    fn from(value: f64) -> Self {
        Self { value, herald_outcome: None, p_herald: None }
    }
}

impl From<&Evaluation> for Score {
    fn from(e: &Evaluation) -> Self {
        Self { value: e.objective(), herald_outcome: e.herald_outcome(), p_herald: Some(e.p_herald()) }
    }
}

pub trait Objective {
    fn score(&mut self, params: &[f64]) -> Score;
}

impl<F: FnMut(&[f64]) -> f64> Objective for F {
    fn score(&mut self, params: &[f64]) -> Score {
        self(params).into()
    }
}

/// CHSH objective of a fixed setup. Evaluation failures score 0.
pub struct ChshObjective<'a> {
    pub evaluator: &'a mut ChshEvaluator,
    pub setup: &'a Setup,
}

impl Objective for ChshObjective<'_> {
    fn score(&mut self, params: &[f64]) -> Score {
        match self.evaluator.evaluate(self.setup, params) {
            Ok(e) => (&e).into(),
            Err(err) => {
                log::warn!("evaluation of {} failed: {err}", self.setup.key());
                0.0.into()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealResult {
    pub best_beta: f64,
    pub best_params: Vec<f64>,
    pub iterations_used: u64,
    pub early_stopped: bool,
    pub herald_outcome: Option<HeraldOutcome>,
    pub p_herald: Option<f64>,
    /// Best-so-far value after each iteration.
    pub record: Vec<f64>,
}

/// Options of one annealing call.
#[derive(Debug, Clone, Copy)]
pub struct AnnealRun<'a> {
    pub trial: u64,
    pub threshold: f64,
    pub schedule: &'a AnnealSchedule,
    /// Starting point; `None` starts from zeros with a best-so-far of 0.
    /// A given start point is scored first and seeds the best-so-far.
    pub start: Option<&'a [f64]>,
}

/// Anneals `n_params` parameters. Each iteration perturbs one uniformly chosen
/// parameter by a uniform step; a move that does not beat the best-so-far is
/// undone with probability `1 - exp(-(best - new) / T_i)`. Stops as soon as
/// the best-so-far exceeds the threshold.
pub fn anneal<O: Objective + ?Sized, R: Rng + ?Sized>(
    n_params: usize,
    objective: &mut O,
    run: AnnealRun<'_>,
    rng: &mut R,
) -> Result<AnnealResult> {
    run.schedule.validate()?;
    if !run.threshold.is_finite() {
        return Err(AnnealError::NonFiniteThreshold);
    }
    let mut current = match run.start {
        Some(s) if s.len() != n_params => return Err(AnnealError::StartLength { expected: n_params, got: s.len() }),
        Some(s) => s.to_vec(),
        None => vec![0.0; n_params],
    };

    let mut best = Score::from(0.0);
    if n_params == 0 || run.start.is_some() {
        best = objective.score(&current);
    }
    let mut best_params = current.clone();
    let mut result = AnnealResult {
        best_beta: best.value,
        best_params: Vec::new(),
        iterations_used: 0,
        early_stopped: best.value > run.threshold && (n_params == 0 || run.start.is_some()),
        herald_outcome: best.herald_outcome,
        p_herald: best.p_herald,
        record: Vec::new(),
    };
    if n_params == 0 || result.early_stopped {
        result.best_params = best_params;
        return Ok(result);
    }

    let budget = run.schedule.iterations(run.trial);
    for i in 1..=budget {
        let k = rng.random_range(0..n_params);
        let step = rng.random_range(-run.schedule.xi..=run.schedule.xi);
        let previous = current[k];
        current[k] += step;
        let s = objective.score(&current);
        if s.value > best.value {
            best = s;
            best_params.copy_from_slice(&current);
        } else {
            let temp = run.schedule.temperature(i, run.trial)?;
            if rng.random::<f64>() < reversion_probability(best.value - s.value, temp) {
                current[k] = previous;
            }
        }
        result.record.push(best.value);
        result.iterations_used = i;
        if best.value > run.threshold {
            result.early_stopped = true;
            break;
        }
    }
    result.best_beta = best.value;
    result.best_params = best_params;
    result.herald_outcome = best.herald_outcome;
    result.p_herald = best.p_herald;
    Ok(result)
}
