use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{chsh_score, BellError, CorrelationTable, DetectorModel, HeraldOutcome, HeraldSpec, Result};
use crate::fock::{
    element_unitary, FockError, FockSimulator, LocalUnitary, ModeSystem, PureState, SettingBranches, Setup,
    TruncationConfig,
};
use crate::C64;

/// Score of the kept herald branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub beta: f64,
    pub herald_outcome: HeraldOutcome,
    /// Smallest probability of the kept herald outcome over the four rounds;
    /// 1 when there is no heralding.
    pub p_herald: f64,
    pub table: CorrelationTable,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evaluation {
    Feasible(ChshResult),
    /// No herald branch reaches the minimal probability. `p_herald` is the
    /// best probability that was available.
    Infeasible {
        p_herald: f64,
    },
}

impl Evaluation {
    /// The value maximized during search; infeasible points score zero.
    pub fn objective(&self) -> f64 {
        match self {
            Evaluation::Feasible(r) => r.beta,
            Evaluation::Infeasible { .. } => 0.0,
        }
    }

    pub fn result(&self) -> Option<&ChshResult> {
        match self {
            Evaluation::Feasible(r) => Some(r),
            Evaluation::Infeasible { .. } => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Evaluation::Feasible(_))
    }

    pub fn p_herald(&self) -> f64 {
        match self {
            Evaluation::Feasible(r) => r.p_herald,
            Evaluation::Infeasible { p_herald } => *p_herald,
        }
    }

    pub fn herald_outcome(&self) -> Option<HeraldOutcome> {
        self.result().map(|r| r.herald_outcome)
    }
}

/// Per-outcome data gathered for the four rounds.
struct Candidate {
    outcome: HeraldOutcome,
    probabilities: [f64; 4],
    distributions: [[[f64; 2]; 2]; 4],
}

const TIE: f64 = 1e-12;

fn select(candidates: Vec<Candidate>, p_min: Option<f64>) -> Evaluation {
    let mut best: Option<ChshResult> = None;
    let mut best_available: f64 = 0.0;
    for c in candidates {
        let p = c.probabilities.iter().copied().fold(f64::INFINITY, f64::min);
        best_available = best_available.max(p);
        if p_min.is_some_and(|pm| !(p >= pm)) {
            continue;
        }
        let d = c.distributions;
        let table = CorrelationTable::new([[d[0], d[1]], [d[2], d[3]]]);
        let beta = chsh_score(&table);
        let better = match &best {
            None => true,
            Some(b) => beta > b.beta + TIE || ((beta - b.beta).abs() <= TIE && p > b.p_herald),
        };
        if better {
            best = Some(ChshResult { beta, herald_outcome: c.outcome, p_herald: p, table });
        }
    }
    match best {
        Some(r) => Evaluation::Feasible(r),
        None => Evaluation::Infeasible { p_herald: best_available },
    }
}

/// Normalizes a joint distribution by its own total so that exactly
/// deterministic outcomes come out as exact ones.
fn normalized(mut dist: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let total: f64 = dist.iter().flatten().sum();
    dist.iter_mut().flatten().for_each(|p| *p /= total);
    dist
}

/// Unnormalized joint click statistics of a state, one 2x2 table per entry
/// of `herald_weights`. All detectors are diagonal in the Fock basis, so
/// only the photon-number populations matter. Without a herald mode the
/// single entry of `herald_weights` is ignored.
fn outcome_masses(state: &PureState, detectors: &DetectorModel, herald_weights: &[Vec<f64>]) -> Vec<[[f64; 2]; 2]> {
    let d = state.d();
    let party = [detectors.no_click_weights(d), detectors.click_weights(d)];
    let herald_levels = if state.n() == 3 { d } else { 1 };
    let mut out = vec![[[0.0; 2]; 2]; herald_weights.len()];
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let k = idx % herald_levels;
        let j = (idx / herald_levels) % d;
        let i = idx / (herald_levels * d);
        for (table, wh) in out.iter_mut().zip(herald_weights) {
            let ph = if herald_levels == 1 { p } else { p * wh[k] };
            for (a, wa) in party.iter().enumerate() {
                for (b, wb) in party.iter().enumerate() {
                    table[a][b] += ph * wa[i] * wb[j];
                }
            }
        }
    }
    out
}

fn check_herald(system: &ModeSystem, spec: Option<&HeraldSpec>) -> Result<()> {
    match (system.herald_mode(), spec) {
        (_, Some(spec)) => spec.check(system),
        _ => Ok(()),
    }
}

fn score_branches(
    branches: &SettingBranches,
    spec: Option<&HeraldSpec>,
    detectors: &DetectorModel,
    system: &ModeSystem,
) -> Result<Evaluation> {
    check_herald(system, spec)?;
    let d = branches.get(0, 0).d();
    let candidates = match (system.has_herald(), spec) {
        (true, Some(spec)) => {
            let det = spec.detector();
            let weights = [det.click_weights(d), det.no_click_weights(d)];
            let mut candidates = [HeraldOutcome::Click, HeraldOutcome::NoClick].map(|outcome| Candidate {
                outcome,
                probabilities: [0.0; 4],
                distributions: [[[0.0; 2]; 2]; 4],
            });
            for (i, (_, state)) in branches.iter().enumerate() {
                let norm = state.norm();
                if norm == 0.0 {
                    return Err(BellError::ZeroNorm);
                }
                for (c, mass) in candidates.iter_mut().zip(outcome_masses(state, detectors, &weights)) {
                    let probability = mass.iter().flatten().sum::<f64>() / (norm * norm);
                    if probability > 0.0 {
                        c.probabilities[i] = probability;
                        c.distributions[i] = normalized(mass);
                    }
                }
            }
            candidates.into_iter().collect()
        }
        _ => {
            let mut c =
                Candidate { outcome: HeraldOutcome::None, probabilities: [1.0; 4], distributions: [[[0.0; 2]; 2]; 4] };
            let ones = [vec![1.0; d]];
            for (i, (_, state)) in branches.iter().enumerate() {
                if state.norm() == 0.0 {
                    return Err(BellError::ZeroNorm);
                }
                c.distributions[i] = normalized(outcome_masses(state, detectors, &ones)[0]);
            }
            vec![c]
        }
    };
    Ok(select(candidates, spec.map(HeraldSpec::p_min)))
}

/// CHSH score of a parametrized setup through conditional states: each round
/// is simulated, the herald is measured, and Alice and Bob measure the
/// conditional state of their modes. The herald outcome with the larger score
/// among those reaching `p_min` in every round is kept.
pub fn evaluate_setup(
    setup: &Setup,
    params: &[f64],
    herald: Option<&HeraldSpec>,
    detectors: &DetectorModel,
    trunc: &TruncationConfig,
    system: &ModeSystem,
) -> Result<Evaluation> {
    let sim = FockSimulator::new(system.clone(), trunc.d())?;
    let branches = sim.branches(setup, params)?;
    score_branches(&branches, herald, detectors, system)
}

/// Unconditioned outcome probabilities of every round: for each herald
/// outcome, `joint[round][k][a][b]` with round `2x + y`, outcome index 0 for
/// no click and 1 for click.
#[derive(Debug, Clone, PartialEq)]
pub struct JointProbabilities {
    pub herald_outcomes: Vec<HeraldOutcome>,
    pub joint: [Vec<[[f64; 2]; 2]>; 4],
}

impl JointProbabilities {
    /// Total probability of a round over all outcome triples.
    pub fn round_total(&self, round: usize) -> f64 {
        self.joint[round].iter().flatten().flatten().sum()
    }
}

/// Joint probabilities `<psi| P_a (x) P_b (x) P_h |psi>` computed with dense
/// full-space unitaries and Kronecker-product POVMs.
pub fn joint_outcome_probabilities(
    setup: &Setup,
    params: &[f64],
    herald: Option<&HeraldSpec>,
    detectors: &DetectorModel,
    trunc: &TruncationConfig,
    system: &ModeSystem,
) -> Result<JointProbabilities> {
    check_herald(system, herald)?;
    if !setup.is_canonical() {
        return Err(FockError::NonCanonicalSetup.into());
    }
    if params.len() != setup.num_params() {
        return Err(FockError::ParamLengthMismatch { expected: setup.num_params(), got: params.len() }.into());
    }
    let d = trunc.d();
    let dim = d.pow(system.n() as u32);
    let unitaries: Vec<DMatrix<C64>> = setup
        .elements()
        .iter()
        .zip(params)
        .map(|(e, &p)| element_unitary(e, p, trunc, system))
        .collect::<std::result::Result<_, _>>()?;

    let (click, no_click) = detectors.povm(d);
    let party = [no_click, click];
    let herald_povm: Vec<(HeraldOutcome, DMatrix<C64>)> = match (system.has_herald(), herald) {
        (true, Some(spec)) => {
            let (c, nc) = spec.detector().povm(d);
            vec![(HeraldOutcome::Click, c), (HeraldOutcome::NoClick, nc)]
        }
        (true, None) => vec![(HeraldOutcome::None, DMatrix::identity(d, d))],
        (false, _) => vec![(HeraldOutcome::None, DMatrix::identity(1, 1))],
    };

    let mut joint: [Vec<[[f64; 2]; 2]>; 4] = Default::default();
    for x in 0..2 {
        for y in 0..2 {
            let mut psi = DVector::<C64>::zeros(dim);
            psi[0] = C64::new(1.0, 0.0);
            for i in setup.application_order() {
                if setup.elements()[i].active_in(x, y) {
                    psi = &unitaries[i] * psi;
                }
            }
            for (_, ph) in &herald_povm {
                let mut table = [[0.0; 2]; 2];
                for (a, pa) in party.iter().enumerate() {
                    for (b, pb) in party.iter().enumerate() {
                        let op = pa.kronecker(pb).kronecker(ph);
                        table[a][b] = psi.dotc(&(op * &psi)).re;
                    }
                }
                joint[2 * x + y].push(table);
            }
        }
    }
    Ok(JointProbabilities { herald_outcomes: herald_povm.into_iter().map(|(o, _)| o).collect(), joint })
}

/// Brute-force reference for [`evaluate_setup`]: herald conditioning of the
/// joint probabilities by Bayes' rule, with no conditional states formed.
pub fn evaluate_joint_oracle(
    setup: &Setup,
    params: &[f64],
    herald: Option<&HeraldSpec>,
    detectors: &DetectorModel,
    trunc: &TruncationConfig,
    system: &ModeSystem,
) -> Result<Evaluation> {
    let jp = joint_outcome_probabilities(setup, params, herald, detectors, trunc, system)?;
    let conditioned = system.has_herald() && herald.is_some();
    let mut candidates = Vec::new();
    for (k, &outcome) in jp.herald_outcomes.iter().enumerate() {
        let mut c = Candidate { outcome, probabilities: [0.0; 4], distributions: [[[0.0; 2]; 2]; 4] };
        for round in 0..4 {
            let table = jp.joint[round][k];
            let p: f64 = table.iter().flatten().sum();
            c.probabilities[round] = if conditioned { p } else { 1.0 };
            if p > 0.0 {
                c.distributions[round] = normalized(table);
            }
        }
        candidates.push(c);
    }
    Ok(select(candidates, herald.map(HeraldSpec::p_min)))
}

/// Repeated evaluation of setups with per-element unitary caching: when only
/// some parameters change between calls, only those elements are rebuilt.
#[derive(Debug)]
pub struct ChshEvaluator {
    sim: FockSimulator,
    herald: Option<HeraldSpec>,
    detectors: DetectorModel,
    cache_key: String,
    cache_params: Vec<f64>,
    cache: Vec<LocalUnitary>,
    evaluations: u64,
}

impl ChshEvaluator {
    pub fn new(system: ModeSystem, d: usize, herald: Option<HeraldSpec>, detectors: DetectorModel) -> Result<Self> {
        check_herald(&system, herald.as_ref())?;
        Ok(Self {
            sim: FockSimulator::new(system, d)?,
            herald,
            detectors,
            cache_key: String::new(),
            cache_params: Vec::new(),
            cache: Vec::new(),
            evaluations: 0,
        })
    }

    pub fn system(&self) -> &ModeSystem {
        self.sim.system()
    }

    pub fn d(&self) -> usize {
        self.sim.d()
    }

    pub fn herald(&self) -> Option<&HeraldSpec> {
        self.herald.as_ref()
    }

    pub fn detectors(&self) -> &DetectorModel {
        &self.detectors
    }

    /// Number of evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn evaluate(&mut self, setup: &Setup, params: &[f64]) -> Result<Evaluation> {
        if !setup.is_canonical() {
            return Err(FockError::NonCanonicalSetup.into());
        }
        if params.len() != setup.num_params() {
            return Err(FockError::ParamLengthMismatch { expected: setup.num_params(), got: params.len() }.into());
        }
        let key = setup.key();
        if key != self.cache_key {
            setup.validate(self.sim.system())?;
            self.cache = setup
                .elements()
                .iter()
                .zip(params)
                .map(|(e, &p)| self.sim.local_unitary(e, p))
                .collect::<std::result::Result<_, _>>()?;
            self.cache_params = params.to_vec();
            self.cache_key = key;
        } else {
            for (i, (e, &p)) in setup.elements().iter().zip(params).enumerate() {
                if self.cache_params[i] != p {
                    self.cache[i] = self.sim.local_unitary(e, p)?;
                    self.cache_params[i] = p;
                }
            }
        }
        let branches = self.sim.branches_from(setup, &self.cache);
        self.evaluations += 1;
        score_branches(&branches, self.herald.as_ref(), &self.detectors, self.sim.system())
    }

    /// States of the four rounds for the given parameters.
    pub fn states(&self, setup: &Setup, params: &[f64]) -> Result<Vec<PureState>> {
        let b = self.sim.branches(setup, params)?;
        Ok(b.iter().map(|(_, s)| s.clone()).collect())
    }
}
