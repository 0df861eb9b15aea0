use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{CurvePoint, TrialRecord};
use super::{replica_seed, Result, RunConfig};
use crate::agent::{AgentMemory, MemorySnapshot, Percept};
use crate::anneal::{anneal, AnnealResult, AnnealRun, AnnealSchedule, Objective, Score};
use crate::bell::{ChshEvaluator, DetectorModel};
use crate::fock::{simplify_setup, Setup};

/// Output of one replica.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningRun {
    pub seed: u64,
    pub curve: Vec<CurvePoint>,
    pub trials: Vec<TrialRecord>,
    pub memory: Option<MemorySnapshot>,
}

impl LearningRun {
    pub fn best(&self) -> f64 {
        self.curve.last().map_or(0.0, |p| p.beta_best)
    }

    pub fn total_reward(&self) -> u64 {
        self.curve.iter().map(|p| p.reward as u64).sum()
    }
}

/// Objective that counts calls and keeps the first evaluation error.
struct Counted<'a> {
    evaluator: &'a mut ChshEvaluator,
    setup: &'a Setup,
    calls: u64,
    error: Option<String>,
}

impl Objective for Counted<'_> {
    fn score(&mut self, params: &[f64]) -> Score {
        self.calls += 1;
        match self.evaluator.evaluate(self.setup, params) {
            Ok(e) => (&e).into(),
            Err(err) => {
                self.error.get_or_insert_with(|| err.to_string());
                0.0.into()
            }
        }
    }
}

pub(super) struct Attempt {
    pub result: AnnealResult,
    pub evaluations: u64,
    pub error: Option<String>,
}

/// Verdict on a point that beat the running best.
pub(super) struct Verification {
    pub beta: Option<f64>,
    pub regressed: bool,
    pub discrepancy: bool,
    pub error: Option<String>,
}

/// Search and verification evaluators plus the two running bests: the
/// search value that thresholds annealing and the recorded verified value.
pub(super) struct Engine {
    search: ChshEvaluator,
    verify: ChshEvaluator,
    schedule: AnnealSchedule,
    tolerance: f64,
    pub search_best: f64,
    pub recorded_best: f64,
}

impl Engine {
    pub fn new(config: &RunConfig) -> Result<Self> {
        Self::with_detectors(config, config.detectors()?)
    }

    pub fn with_detectors(config: &RunConfig, detectors: DetectorModel) -> Result<Self> {
        let system = config.system()?;
        let herald = config.herald()?;
        let trunc = config.truncation()?;
        Ok(Self {
            search: ChshEvaluator::new(system.clone(), trunc.d(), herald, detectors.clone())?,
            verify: ChshEvaluator::new(system, trunc.d_verify(), herald, detectors)?,
            schedule: config.schedule,
            tolerance: config.discrepancy_tolerance,
            search_best: 0.0,
            recorded_best: 0.0,
        })
    }

    pub fn anneal(
        &mut self,
        setup: &Setup,
        trial: u64,
        start: Option<&[f64]>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Attempt> {
        let mut objective = Counted { evaluator: &mut self.search, setup, calls: 0, error: None };
        let run = AnnealRun { trial, threshold: self.search_best, schedule: &self.schedule, start };
        let result = anneal(setup.num_params(), &mut objective, run, rng)?;
        Ok(Attempt { result, evaluations: objective.calls, error: objective.error })
    }

    /// Accepts a new search best and records its verified score.
    pub fn accept(&mut self, setup: &Setup, params: &[f64], search_beta: f64) -> Verification {
        self.search_best = search_beta;
        match self.verify.evaluate(setup, params) {
            Ok(e) => {
                let beta = e.objective();
                let regressed = beta < self.recorded_best;
                let discrepancy = (beta - search_beta).abs() > self.tolerance;
                if discrepancy {
                    log::warn!(
                        "{}: search score {search_beta:.6} but verified score {beta:.6}",
                        setup.labels().join(" ")
                    );
                }
                self.recorded_best = self.recorded_best.max(beta);
                Verification { beta: Some(beta), regressed, discrepancy, error: None }
            }
            Err(err) => {
                log::error!("verification of {} failed: {err}", setup.labels().join(" "));
                Verification { beta: None, regressed: false, discrepancy: false, error: Some(err.to_string()) }
            }
        }
    }
}

pub(super) fn curve_point(record: &TrialRecord, beta_best: f64) -> CurvePoint {
    CurvePoint {
        trial: record.trial,
        beta_best,
        reward: record.reward,
        length: record.length,
        p_herald: record.p_herald,
    }
}

/// Runs the learning protocol for replica 0 of the configured seed.
pub fn run_learning(config: &RunConfig) -> Result<LearningRun> {
    learning_replica(config, replica_seed(config.seed, 0))
}

/// Runs every replica in parallel. Replica `r` uses `replica_seed(seed, r)`.
pub fn run_learning_replicas(config: &RunConfig) -> Result<Vec<LearningRun>> {
    config.validate()?;
    (0..config.replicas as u64)
        .into_par_iter()
        .map(|r| learning_replica(config, replica_seed(config.seed, r)))
        .collect()
}

fn learning_replica(config: &RunConfig, seed: u64) -> Result<LearningRun> {
    config.validate()?;
    let alphabet = config.alphabet()?;
    alphabet.validate(&config.system()?)?;
    let ids = alphabet.ids();
    let mut memory = AgentMemory::new(config.agent)?;
    let mut engine = Engine::new(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curve = Vec::new();
    let mut trials = Vec::new();

    for t in 1..=config.trials {
        let clock = Instant::now();
        let mut setup = Setup::empty();
        let mut record = TrialRecord {
            trial: t,
            actions: Vec::new(),
            setup: Vec::new(),
            params: Vec::new(),
            beta_steps: Vec::new(),
            beta_search: 0.0,
            beta_verified: None,
            reward: 0,
            length: 0,
            p_herald: None,
            herald_outcome: None,
            evaluations: 0,
            regressed: false,
            discrepancy: false,
            error: None,
            wall_time_s: 0.0,
        };
        let mut trial_best = f64::NEG_INFINITY;

        for _ in 0..config.k_max {
            let percept = Percept::of(&setup);
            let action = memory.sample_action(&percept, &ids, &mut rng)?;
            let mut raw = setup.elements().to_vec();
            raw.push(alphabet.get(action).clone());
            setup = simplify_setup(&raw);
            record.actions.push(alphabet.get(action).label());

            let attempt = engine.anneal(&setup, t, None, &mut rng)?;
            record.evaluations += attempt.evaluations;
            let result = attempt.result;
            record.beta_steps.push(result.best_beta);
            if result.best_beta > trial_best {
                trial_best = result.best_beta;
                record.setup = setup.labels();
                record.params = result.best_params.clone();
                record.p_herald = result.p_herald;
                record.herald_outcome = result.herald_outcome;
            }
            if let Some(err) = attempt.error {
                log::error!("trial {t}: evaluation failed, trial aborted: {err}");
                record.error = Some(err);
                memory.step_update((&percept, action), 0)?;
                break;
            }

            let reward = u8::from(result.best_beta > engine.search_best);
            memory.step_update((&percept, action), reward)?;
            if reward == 1 {
                let v = engine.accept(&setup, &result.best_params, result.best_beta);
                record.reward = 1;
                record.beta_verified = v.beta;
                record.regressed = v.regressed;
                record.discrepancy = v.discrepancy;
                record.error = v.error;
                break;
            }
            if setup.len() >= config.l_max {
                break;
            }
        }

        record.length = setup.len();
        record.beta_search = trial_best.max(0.0);
        record.wall_time_s = clock.elapsed().as_secs_f64();
        curve.push(curve_point(&record, engine.recorded_best));
        log::debug!("trial {t}: reward {} best {:.6}", record.reward, engine.recorded_best);
        trials.push(record);
    }

    Ok(LearningRun { seed, curve, trials, memory: Some(memory.snapshot(&alphabet.labels())) })
}
