use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bellforge::bell::{ChshEvaluator, Evaluation};
use bellforge::fock::{ElementKind, Setup};
use bellforge::gaussian::{
    canonical_decompose, chsh_count, compose_bogolyubov_plan, compose_plan, random_bogolyubov, random_unitary,
    reck_decompose, BogolyubovTransform, DecompositionPlan, LinearOpticsUnitary,
};
use bellforge::harness::{
    efficiency_sweep, load_params, load_setup, run_fixed_replicas, run_learning_replicas, save_params, save_setup,
    write_json, write_replicas, write_sweep, LearningRun, RunConfig,
};
use bellforge::C64;
use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

/// Learn, optimize and analyze photonic Bell-test setups.
#[derive(Parser)]
#[command(name = "bellforge", version)]
struct Cli {
    #[command(flatten)]
    opts: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Run configuration (TOML or JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    replicas: Option<usize>,
    /// Number of modes (2 without herald, 3 with).
    #[arg(long, global = true)]
    modes: Option<usize>,
    /// Fock truncation used during search.
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Fock truncation used to verify rewarded points.
    #[arg(long = "d-verify", global = true)]
    d_verify: Option<usize>,
    #[arg(long = "p-min", global = true)]
    p_min: Option<f64>,
    /// Detection efficiency of Alice and Bob.
    #[arg(long, global = true)]
    eta: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the learning agent.
    Learn,
    /// Optimize the parameters of a fixed setup.
    OptimizeFixed { setup: PathBuf },
    /// Score a setup at given parameters (zeros when omitted).
    Evaluate { setup: PathBuf, params: Option<PathBuf> },
    /// Re-optimize a setup over a grid of detection efficiencies.
    SweepEta {
        setup: PathBuf,
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Decompose a linear-optics unitary or a Bogolyubov transformation.
    Decompose {
        #[command(subcommand)]
        source: Source,
    },
    /// Real parameters of the general setup for a CHSH test.
    CountParams {
        /// Total number of modes.
        n: usize,
        /// Modes received by Alice.
        k_a: usize,
        /// Modes received by Bob.
        k_b: usize,
    },
}

#[derive(Subcommand)]
enum Source {
    Identity {
        #[arg(long, short)]
        n: usize,
    },
    Random {
        #[arg(long, short)]
        n: usize,
        /// Largest squeezing; 0 gives a linear-optics unitary.
        #[arg(long, default_value_t = 0.0)]
        squeeze: f64,
    },
    /// JSON with `f` and optional `h` and `alpha`, complex entries as [re, im].
    File { path: PathBuf },
}

impl Overrides {
    fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        c.seed = self.seed.unwrap_or(c.seed);
        c.trials = self.trials.unwrap_or(c.trials);
        c.replicas = self.replicas.unwrap_or(c.replicas);
        c.n = self.modes.unwrap_or(c.n);
        c.d = self.d.unwrap_or(c.d);
        c.d_verify = self.d_verify.unwrap_or(c.d_verify);
        c.p_min = self.p_min.unwrap_or(c.p_min);
        c.eta = self.eta.unwrap_or(c.eta);
        c.validate()?;
        Ok(c)
    }

    fn out(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("results"))
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let opts = &cli.opts;
    match &cli.command {
        Command::Learn => {
            let config = opts.config()?;
            let runs = run_learning_replicas(&config)?;
            finish_runs(&opts.out(), &runs)
        }
        Command::OptimizeFixed { setup } => {
            let config = opts.config()?;
            let runs = run_fixed_replicas(&load_setup(setup)?, &config)?;
            finish_runs(&opts.out(), &runs)
        }
        Command::Evaluate { setup, params } => evaluate(opts, setup, params.as_deref()),
        Command::SweepEta { setup, grid } => {
            let mut config = opts.config()?;
            if let Some(grid) = grid {
                config.eta_grid = grid.clone();
                config.validate()?;
            }
            let points = efficiency_sweep(&load_setup(setup)?, &config)?;
            let path = opts.out().join("sweep.csv");
            write_sweep(&path, &points)?;
            println!("eta,beta");
            for p in &points {
                println!("{},{}", p.eta, p.beta);
            }
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        Command::Decompose { source } => decompose(opts, source),
        Command::CountParams { n, k_a, k_b } => {
            println!("{}", chsh_count(*n, *k_a, *k_b)?);
            Ok(())
        }
    }
}

fn finish_runs(out: &Path, runs: &[LearningRun]) -> Result<()> {
    write_replicas(out, runs)?;
    for (r, run) in runs.iter().enumerate() {
        println!(
            "replica {r}: best beta {:.6}, rewards {}, trials {}",
            run.best(),
            run.total_reward(),
            run.curve.len()
        );
    }
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn evaluate(opts: &Overrides, setup_path: &Path, params_path: Option<&Path>) -> Result<()> {
    let config = opts.config()?;
    let setup = load_setup(setup_path)?;
    let params = match params_path {
        Some(p) => load_params(p)?,
        None => vec![0.0; setup.num_params()],
    };
    if params.len() != setup.num_params() {
        bail!("setup has {} parameters but {} were given", setup.num_params(), params.len());
    }
    let mut evaluator = ChshEvaluator::new(config.system()?, config.d, config.herald()?, config.detectors()?)?;
    let evaluation = evaluator.evaluate(&setup, &params)?;
    let report = match &evaluation {
        Evaluation::Feasible(r) => {
            println!("beta      {:.12}", r.beta);
            println!("branch    {:?}", r.herald_outcome);
            println!("p_herald  {:e}", r.p_herald);
            println!("P(a,b|x,y)   ++           +-           -+           --");
            for x in 0..2 {
                for y in 0..2 {
                    let d = r.table.distribution(x, y);
                    println!("x={x} y={y}   {:.6e} {:.6e} {:.6e} {:.6e}", d[0][0], d[0][1], d[1][0], d[1][1]);
                }
            }
            json!({ "feasible": true, "d": config.d, "eta": config.eta, "result": r })
        }
        Evaluation::Infeasible { p_herald } => {
            println!("infeasible: best herald probability {p_herald:e} below p_min {:e}", config.p_min);
            json!({ "feasible": false, "d": config.d, "eta": config.eta, "p_herald": p_herald })
        }
    };
    if let Some(out) = &opts.out {
        std::fs::create_dir_all(out).with_context(|| out.display().to_string())?;
        write_json(&out.join("evaluation.json"), &report)?;
    }
    Ok(())
}

#[derive(Deserialize)]
struct TransformFile {
    f: Vec<Vec<[f64; 2]>>,
    h: Option<Vec<Vec<[f64; 2]>>>,
    alpha: Option<Vec<[f64; 2]>>,
}

fn matrix(rows: &[Vec<[f64; 2]>]) -> Result<DMatrix<C64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        bail!("matrix must be square");
    }
    Ok(DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

enum Target {
    Linear(LinearOpticsUnitary),
    Gaussian(BogolyubovTransform),
}

fn decompose(opts: &Overrides, source: &Source) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.unwrap_or(0));
    let target = match source {
        Source::Identity { n } => Target::Linear(LinearOpticsUnitary::identity(*n)),
        Source::Random { n, squeeze } if *squeeze > 0.0 => {
            Target::Gaussian(random_bogolyubov(*n, *squeeze, &mut rng).0)
        }
        Source::Random { n, .. } => Target::Linear(random_unitary(*n, &mut rng)),
        Source::File { path } => {
            let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
            let file: TransformFile = serde_json::from_str(&text).with_context(|| path.display().to_string())?;
            let f = matrix(&file.f)?;
            let n = f.nrows();
            match (&file.h, &file.alpha) {
                (None, None) => Target::Linear(LinearOpticsUnitary::new(f)?),
                (h, alpha) => {
                    let h = match h {
                        Some(h) => matrix(h)?,
                        None => DMatrix::zeros(n, n),
                    };
                    let alpha = match alpha {
                        Some(a) => DVector::from_iterator(a.len(), a.iter().map(|z| C64::new(z[0], z[1]))),
                        None => DVector::zeros(n),
                    };
                    Target::Gaussian(BogolyubovTransform::new(f, h, alpha)?)
                }
            }
        }
    };

    let (plan, error) = match &target {
        Target::Linear(u) => {
            let plan = reck_decompose(u);
            let error = (compose_plan(&plan, u.n())? - u.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            (plan, error)
        }
        Target::Gaussian(t) => {
            let plan = canonical_decompose(t)?.to_plan();
            let error = compose_bogolyubov_plan(&plan, t.n())?.distance(t);
            (plan, error)
        }
    };
    let out = opts.out();
    std::fs::create_dir_all(&out).with_context(|| out.display().to_string())?;
    write_plan(&out.join("plan.json"), &plan)?;
    let (setup, params) = plan.to_setup()?;
    save_setup(&out.join("setup.json"), &setup)?;
    save_params(&out.join("params.json"), &params)?;
    summarize(&plan, &setup, error);
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn write_plan(path: &Path, plan: &DecompositionPlan) -> Result<()> {
    let entries: Vec<_> = plan
        .entries
        .iter()
        .map(|e| {
            json!({
                "kind": e.kind.short_name(),
                "modes": e.modes.iter().map(|m| m + 1).collect::<Vec<_>>(),
                "value": e.value,
                "layer": e.layer,
                "stage": e.stage,
            })
        })
        .collect();
    write_json(path, &json!({ "version": 1, "n": plan.n, "entries": entries }))?;
    Ok(())
}

fn summarize(plan: &DecompositionPlan, setup: &Setup, error: f64) {
    let count = |k| plan.count(k);
    println!("modes            {}", plan.n);
    println!("beam splitters   {}", count(ElementKind::BeamSplitter));
    println!("phase shifters   {}", count(ElementKind::PhaseShifter));
    println!("squeezers        {}", count(ElementKind::SingleModeSqueezerRe));
    println!("displacements    {}", count(ElementKind::DisplacementRe) + count(ElementKind::DisplacementIm));
    println!("setup elements   {}", setup.len());
    println!("recompose error  {error:.3e}");
}
