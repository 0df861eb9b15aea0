use std::path::Path;

use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, AlphabetSource};
use super::{HarnessError, Result};
use crate::agent::PsParameters;
use crate::anneal::AnnealSchedule;
use crate::bell::{DetectorModel, HeraldSpec};
use crate::fock::{ModeSystem, TruncationConfig};

/// Everything a run needs. Loaded from TOML or JSON; missing fields take
/// their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub alphabet: AlphabetSource,
    /// Number of modes: 2 (Alice, Bob) or 3 (with herald).
    pub n: usize,
    pub d: usize,
    pub d_verify: usize,
    pub l_max: usize,
    pub k_max: usize,
    pub p_min: f64,
    /// Efficiency of Alice's and Bob's detectors.
    pub eta: f64,
    pub herald_eta: f64,
    pub trials: u64,
    pub seed: u64,
    pub replicas: usize,
    pub eta_grid: Vec<f64>,
    /// Trials per grid point in efficiency sweeps.
    pub sweep_trials: u64,
    /// Stop fixed optimizations once this many evaluations were spent.
    pub max_evaluations: Option<u64>,
    /// |beta(d) - beta(d_verify)| above this is reported.
    pub discrepancy_tolerance: f64,
    pub schedule: AnnealSchedule,
    pub agent: PsParameters,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alphabet: AlphabetSource::default(),
            n: 3,
            d: TruncationConfig::DEFAULT_D,
            d_verify: TruncationConfig::DEFAULT_D_VERIFY,
            l_max: 15,
            k_max: 20,
            p_min: HeraldSpec::DEFAULT_P_MIN,
            eta: 1.0,
            herald_eta: 1.0,
            trials: 100,
            seed: 0,
            replicas: 1,
            eta_grid: vec![1.0, 0.75, 0.5, 0.25, 0.0],
            sweep_trials: 30,
            max_evaluations: None,
            discrepancy_tolerance: 0.05,
            schedule: AnnealSchedule::default(),
            agent: PsParameters::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let config: Self = if is_json {
            serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        self.system()?;
        self.truncation()?;
        self.detectors()?;
        self.herald()?;
        self.schedule.validate()?;
        self.agent.validate()?;
        if self.l_max == 0 || self.k_max == 0 {
            return bad("l_max and k_max must be positive".into());
        }
        if self.replicas == 0 {
            return bad("replicas must be at least 1".into());
        }
        if let Some(e) = self.eta_grid.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return bad(format!("eta grid value {e} outside [0, 1]"));
        }
        if !(self.discrepancy_tolerance >= 0.0) {
            return bad("discrepancy_tolerance must be non-negative".into());
        }
        self.alphabet()?;
        Ok(())
    }

    pub fn system(&self) -> Result<ModeSystem> {
        Ok(ModeSystem::with_modes(self.n)?)
    }

    pub fn truncation(&self) -> Result<TruncationConfig> {
        Ok(TruncationConfig::new(self.d, self.d_verify)?)
    }

    pub fn detectors(&self) -> Result<DetectorModel> {
        Ok(DetectorModel::new(self.eta)?)
    }

    /// Herald specification when the system has a herald mode.
    pub fn herald(&self) -> Result<Option<HeraldSpec>> {
        if self.n < 3 {
            return Ok(None);
        }
        Ok(Some(HeraldSpec::new(self.p_min, DetectorModel::new(self.herald_eta)?)?))
    }

    /// The alphabet, unchecked against the mode system; fixed-setup runs
    /// ignore it.
    pub fn alphabet(&self) -> Result<Alphabet> {
        self.alphabet.build()
    }
}
