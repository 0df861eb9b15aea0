//! Two-layer projective-simulation agent with glow and damping.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::Setup;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("no actions available")]
    EmptyActions,
    #[error("reward must be 0 or 1, got {0}")]
    InvalidReward(u8),
    #[error("invalid meta-parameter {name} = {value}")]
    InvalidMetaParameter { name: &'static str, value: f64 },
    #[error("unsupported memory snapshot version {0}")]
    SnapshotVersion(u32),
    #[error("memory snapshot entry is not finite or out of range")]
    SnapshotEntry,
}

pub type Result<T> = std::result::Result<T, AgentError>;

/// Structure of a setup without parameter values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Percept(String);

impl Percept {
    pub fn new(s: impl Into<String>) -> Self {
        Percept(s.into())
    }

    pub fn of(setup: &Setup) -> Self {
        Percept(setup.key())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&Setup> for Percept {
    fn from(setup: &Setup) -> Self {
        Percept::of(setup)
    }
}

/// Index into the action alphabet.
pub type ActionId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsParameters {
    /// Damping rate.
    pub gamma: f64,
    /// Glow decay rate.
    pub eta: f64,
}

impl Default for PsParameters {
    fn default() -> Self {
        Self { gamma: 1e-3, eta: 0.3 }
    }
}

impl PsParameters {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("gamma", self.gamma), ("eta", self.eta)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(AgentError::InvalidMetaParameter { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Edge {
    h: f64,
    glow: f64,
}

impl Default for Edge {
    fn default() -> Self {
        Edge { h: 1.0, glow: 0.0 }
    }
}

/// Edge weights and glow values. Pairs that were never visited are not
/// stored and read as `h = 1`, `glow = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentMemory {
    params: PsParameters,
    edges: BTreeMap<(Percept, ActionId), Edge>,
}

impl Default for AgentMemory {
    fn default() -> Self {
        Self { params: PsParameters::default(), edges: BTreeMap::new() }
    }
}

impl AgentMemory {
    pub fn new(params: PsParameters) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, edges: BTreeMap::new() })
    }

    pub fn params(&self) -> &PsParameters {
        &self.params
    }

    /// Number of stored pairs.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    fn edge(&self, s: &Percept, a: ActionId) -> Edge {
        self.edges.get(&(s.clone(), a)).copied().unwrap_or_default()
    }

    pub fn h(&self, s: &Percept, a: ActionId) -> f64 {
        self.edge(s, a).h
    }

    pub fn glow(&self, s: &Percept, a: ActionId) -> f64 {
        self.edge(s, a).glow
    }

    /// Sets a weight directly.
    pub fn set_h(&mut self, s: &Percept, a: ActionId, h: f64) {
        self.edges.entry((s.clone(), a)).or_default().h = h;
    }

    /// Softmax of `h(s, .)` over `actions`.
    pub fn policy(&self, s: &Percept, actions: &[ActionId]) -> Result<Vec<f64>> {
        if actions.is_empty() {
            return Err(AgentError::EmptyActions);
        }
        let h: Vec<f64> = actions.iter().map(|&a| self.h(s, a)).collect();
        let max = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = h.iter().map(|x| (x - max).exp()).collect();
        let total: f64 = w.iter().sum();
        Ok(w.into_iter().map(|x| x / total).collect())
    }

    pub fn sample_action<R: Rng + ?Sized>(&self, s: &Percept, actions: &[ActionId], rng: &mut R) -> Result<ActionId> {
        let p = self.policy(s, actions)?;
        let dist = WeightedIndex::new(&p).map_err(|_| AgentError::EmptyActions)?;
        Ok(actions[dist.sample(rng)])
    }

    /// One interaction step: glow decays, the visited pair glows at 1, then
    /// every weight is damped toward 1 and credited with `glow * reward`.
    pub fn step_update(&mut self, visited: (&Percept, ActionId), reward: u8) -> Result<()> {
        if reward > 1 {
            return Err(AgentError::InvalidReward(reward));
        }
        let decay = 1.0 - self.params.eta;
        for e in self.edges.values_mut() {
            e.glow *= decay;
        }
        self.edges.entry((visited.0.clone(), visited.1)).or_default().glow = 1.0;
        let r = f64::from(reward);
        let gamma = self.params.gamma;
        for e in self.edges.values_mut() {
            e.h = e.h - gamma * (e.h - 1.0) + e.glow * r;
        }
        Ok(())
    }

    pub fn snapshot(&self, action_labels: &[String]) -> MemorySnapshot {
        MemorySnapshot {
            version: MemorySnapshot::VERSION,
            params: self.params,
            actions: action_labels.to_vec(),
            edges: self
                .edges
                .iter()
                .map(|((s, a), e)| SnapshotEdge { percept: s.clone(), action: *a, h: e.h, glow: e.glow })
                .collect(),
        }
    }

    pub fn from_snapshot(snapshot: &MemorySnapshot) -> Result<Self> {
        if snapshot.version != MemorySnapshot::VERSION {
            return Err(AgentError::SnapshotVersion(snapshot.version));
        }
        let mut memory = Self::new(snapshot.params)?;
        for e in &snapshot.edges {
            if !e.h.is_finite() || !(0.0..=1.0).contains(&e.glow) {
                return Err(AgentError::SnapshotEntry);
            }
            memory.edges.insert((e.percept.clone(), e.action), Edge { h: e.h, glow: e.glow });
        }
        Ok(memory)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEdge {
    pub percept: Percept,
    pub action: ActionId,
    pub h: f64,
    pub glow: f64,
}

/// Serializable agent memory. `actions` holds the labels of the alphabet
/// the action indices refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemorySnapshot {
    pub version: u32,
    pub params: PsParameters,
    pub actions: Vec<String>,
    pub edges: Vec<SnapshotEdge>,
}

impl MemorySnapshot {
    pub const VERSION: u32 = 1;
}
