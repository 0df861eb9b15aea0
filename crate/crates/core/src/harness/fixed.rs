use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::learn::{curve_point, Engine, LearningRun};
use super::output::TrialRecord;
use super::{replica_seed, HarnessError, Result, RunConfig};
use crate::bell::DetectorModel;
use crate::fock::Setup;

fn check_setup(setup: &Setup, config: &RunConfig) -> Result<()> {
    config.validate()?;
    if !setup.is_canonical() {
        return Err(HarnessError::Config("setup is not canonical".into()));
    }
    setup.validate(&config.system()?)?;
    Ok(())
}

/// Anneals the parameters of a fixed setup once per trial, thresholded by
/// the running best, for replica 0 of the configured seed. Stops early once
/// `max_evaluations` is spent.
pub fn run_fixed_optimization(setup: &Setup, config: &RunConfig) -> Result<LearningRun> {
    check_setup(setup, config)?;
    fixed_replica(setup, config, replica_seed(config.seed, 0))
}

pub fn run_fixed_replicas(setup: &Setup, config: &RunConfig) -> Result<Vec<LearningRun>> {
    check_setup(setup, config)?;
    (0..config.replicas as u64)
        .into_par_iter()
        .map(|r| fixed_replica(setup, config, replica_seed(config.seed, r)))
        .collect()
}

fn fixed_replica(setup: &Setup, config: &RunConfig, seed: u64) -> Result<LearningRun> {
    let mut engine = Engine::new(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = setup.labels();
    let mut spent = 0u64;
    let mut curve = Vec::new();
    let mut trials = Vec::new();

    for t in 1..=config.trials {
        if config.max_evaluations.is_some_and(|budget| spent >= budget) {
            break;
        }
        let clock = Instant::now();
        let attempt = engine.anneal(setup, t, None, &mut rng)?;
        spent += attempt.evaluations;
        let result = attempt.result;
        let mut record = TrialRecord {
            trial: t,
            actions: Vec::new(),
            setup: labels.clone(),
            params: result.best_params.clone(),
            beta_steps: vec![result.best_beta],
            beta_search: result.best_beta,
            beta_verified: None,
            reward: 0,
            length: setup.len(),
            p_herald: result.p_herald,
            herald_outcome: result.herald_outcome,
            evaluations: attempt.evaluations,
            regressed: false,
            discrepancy: false,
            error: attempt.error,
            wall_time_s: 0.0,
        };
        if let Some(err) = &record.error {
            log::error!("trial {t}: evaluation failed: {err}");
        } else if result.best_beta > engine.search_best {
            let v = engine.accept(setup, &result.best_params, result.best_beta);
            record.reward = 1;
            record.beta_verified = v.beta;
            record.regressed = v.regressed;
            record.discrepancy = v.discrepancy;
            record.error = v.error;
        }
        record.wall_time_s = clock.elapsed().as_secs_f64();
        curve.push(curve_point(&record, engine.recorded_best));
        trials.push(record);
    }
    Ok(LearningRun { seed, curve, trials, memory: None })
}

/// Best score found at one detection efficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eta: f64,
    pub beta: f64,
    pub params: Vec<f64>,
    pub p_herald: Option<f64>,
    pub evaluations: u64,
}

/// Re-optimizes the setup at each efficiency of the grid, in grid order, for
/// `sweep_trials` trials each. Every annealing run after the first starts
/// from the best parameters found so far.
pub fn efficiency_sweep(setup: &Setup, config: &RunConfig) -> Result<Vec<SweepPoint>> {
    check_setup(setup, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(config.seed, 0));
    let mut warm: Option<Vec<f64>> = None;
    let mut points = Vec::with_capacity(config.eta_grid.len());

    for &eta in &config.eta_grid {
        let mut engine = Engine::with_detectors(config, DetectorModel::new(eta)?)?;
        let mut point = SweepPoint { eta, beta: 0.0, params: Vec::new(), p_herald: None, evaluations: 0 };
        for t in 1..=config.sweep_trials {
            let attempt = engine.anneal(setup, t, warm.as_deref(), &mut rng)?;
            point.evaluations += attempt.evaluations;
            if let Some(err) = attempt.error {
                log::error!("sweep at eta {eta}: evaluation failed: {err}");
                break;
            }
            let result = attempt.result;
            if result.best_beta > engine.search_best || t == 1 {
                engine.search_best = result.best_beta;
                point.beta = result.best_beta;
                point.p_herald = result.p_herald;
                point.params = result.best_params.clone();
                warm = Some(result.best_params);
            }
        }
        log::info!("eta {eta}: beta {:.6}", point.beta);
        points.push(point);
    }
    Ok(points)
}
