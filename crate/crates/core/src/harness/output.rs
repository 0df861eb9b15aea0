use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fixed::SweepPoint;
use super::learn::LearningRun;
use super::{write_json, HarnessError, Result};
use crate::bell::HeraldOutcome;

/// One trial of a learning or fixed-setup run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// Labels of the actions taken, one per step.
    pub actions: Vec<String>,
    /// Final setup of the trial.
    pub setup: Vec<String>,
    pub params: Vec<f64>,
    /// Best score of each step's annealing run at the search truncation.
    pub beta_steps: Vec<f64>,
    /// Best score of the trial at the search truncation.
    pub beta_search: f64,
    /// Score of the rewarded point at the verification truncation.
    pub beta_verified: Option<f64>,
    pub reward: u8,
    pub length: usize,
    pub p_herald: Option<f64>,
    pub herald_outcome: Option<HeraldOutcome>,
    pub evaluations: u64,
    /// The verified score fell below the previous recorded best.
    pub regressed: bool,
    /// Search and verified scores differ by more than the tolerance.
    pub discrepancy: bool,
    pub error: Option<String>,
    pub wall_time_s: f64,
}

/// Row of `learning_curve.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub trial: u64,
    pub beta_best: f64,
    pub reward: u8,
    pub length: usize,
    pub p_herald: Option<f64>,
}

/// Trial-wise mean and mean squared deviation over replicas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub trial: u64,
    pub beta_best_mean: f64,
    pub beta_best_msd: f64,
    pub reward_mean: f64,
    pub reward_msd: f64,
    pub length_mean: f64,
    pub length_msd: f64,
    pub replicas: usize,
}

fn mean_msd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (mean, xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n)
}

/// Aggregates curves trial by trial, over the trials all curves share.
pub fn aggregate(curves: &[&[CurvePoint]]) -> Vec<CurveSummary> {
    let len = curves.iter().map(|c| c.len()).min().unwrap_or(0);
    (0..len)
        .map(|i| {
            let col = |f: fn(&CurvePoint) -> f64| curves.iter().map(|c| f(&c[i])).collect::<Vec<_>>();
            let (beta_best_mean, beta_best_msd) = mean_msd(&col(|p| p.beta_best));
            let (reward_mean, reward_msd) = mean_msd(&col(|p| p.reward as f64));
            let (length_mean, length_msd) = mean_msd(&col(|p| p.length as f64));
            CurveSummary {
                trial: curves[0][i].trial,
                beta_best_mean,
                beta_best_msd,
                reward_mean,
                reward_msd,
                length_mean,
                length_msd,
                replicas: curves.len(),
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let err = |e: csv::Error| HarnessError::Format(format!("{}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(err)?;
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

/// Writes `learning_curve.csv`, `trials.jsonl` and, when present,
/// `memory.json` into `dir`.
pub fn write_learning_run(dir: &Path, run: &LearningRun) -> Result<()> {
    create_dir(dir)?;
    write_csv(&dir.join("learning_curve.csv"), &run.curve, &["trial", "beta_best", "reward", "length", "p_herald"])?;
    let path = dir.join("trials.jsonl");
    let mut out = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    for record in &run.trials {
        let line = serde_json::to_string(record).expect("serializable");
        writeln!(out, "{line}").map_err(|e| HarnessError::io(&path, e))?;
    }
    if let Some(memory) = &run.memory {
        write_json(&dir.join("memory.json"), memory)?;
    }
    Ok(())
}

/// A single run goes straight into `dir`; several go into `replica_XX`
/// subdirectories next to `learning_curve_summary.csv`.
pub fn write_replicas(dir: &Path, runs: &[LearningRun]) -> Result<()> {
    if let [run] = runs {
        return write_learning_run(dir, run);
    }
    create_dir(dir)?;
    for (r, run) in runs.iter().enumerate() {
        write_learning_run(&dir.join(format!("replica_{r:02}")), run)?;
    }
    let curves: Vec<&[CurvePoint]> = runs.iter().map(|r| r.curve.as_slice()).collect();
    write_csv(
        &dir.join("learning_curve_summary.csv"),
        &aggregate(&curves),
        &[
            "trial",
            "beta_best_mean",
            "beta_best_msd",
            "reward_mean",
            "reward_msd",
            "length_mean",
            "length_msd",
            "replicas",
        ],
    )
}

pub fn write_sweep(path: &Path, points: &[SweepPoint]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    #[derive(Serialize)]
    struct Row {
        eta: f64,
        beta: f64,
    }
    let rows: Vec<Row> = points.iter().map(|p| Row { eta: p.eta, beta: p.beta }).collect();
    write_csv(path, &rows, &["eta", "beta"])
}
