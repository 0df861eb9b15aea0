use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{make_annihilation, FockError, ModeRole, ModeSystem, Result};
use crate::C64;

/// The optical devices available to a setup.
///
/// Complex-parameter devices come as a real-part and an imaginary-part variant,
/// each carrying a single real parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElementKind {
    PhaseShifter,
    BeamSplitter,
    DisplacementRe,
    DisplacementIm,
    SingleModeSqueezerRe,
    SingleModeSqueezerIm,
    TwoModeSqueezer,
}

impl ElementKind {
    pub const ALL: [ElementKind; 7] = [
        ElementKind::PhaseShifter,
        ElementKind::BeamSplitter,
        ElementKind::DisplacementRe,
        ElementKind::DisplacementIm,
        ElementKind::SingleModeSqueezerRe,
        ElementKind::SingleModeSqueezerIm,
        ElementKind::TwoModeSqueezer,
    ];

    pub fn arity(self) -> usize {
        match self {
            ElementKind::BeamSplitter | ElementKind::TwoModeSqueezer => 2,
            _ => 1,
        }
    }

    pub fn is_displacement(self) -> bool {
        matches!(self, ElementKind::DisplacementRe | ElementKind::DisplacementIm)
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ElementKind::PhaseShifter => "PS",
            ElementKind::BeamSplitter => "BS",
            ElementKind::DisplacementRe => "DRe",
            ElementKind::DisplacementIm => "DIm",
            ElementKind::SingleModeSqueezerRe => "SMSRe",
            ElementKind::SingleModeSqueezerIm => "SMSIm",
            ElementKind::TwoModeSqueezer => "TMS",
        }
    }

    pub(crate) fn index(self) -> usize {
        Self::ALL.iter().position(|k| *k == self).unwrap()
    }

    /// Hermitian `K` on the local space (`d` or `d^2` levels) such that the
    /// element with parameter `v` is `exp(i v K)`.
    ///
    /// In the Heisenberg picture `U^dag a U` this gives, before truncation,
    /// PS: `a -> e^{iv} a`, BS: `a1 -> cos v a1 - sin v a2`, `a2 -> sin v a1 + cos v a2`,
    /// DRe: `a -> a + v`, DIm: `a -> a + iv`, SMSRe: `a -> cosh v a + sinh v a^dag`,
    /// SMSIm: `a -> cosh v a + i sinh v a^dag`, TMS: `a1 -> cosh v a1 + sinh v a2^dag`.
    pub fn local_hermitian(self, d: usize) -> Result<DMatrix<C64>> {
        let a = make_annihilation(d)?;
        let ad = a.adjoint();
        let i = C64::i();
        let half = C64::new(0.5, 0.0);
        // anti-Hermitian generator A, with K = -i A
        let gen = match self {
            ElementKind::PhaseShifter => (&ad * &a) * i,
            ElementKind::DisplacementRe => &ad - &a,
            ElementKind::DisplacementIm => (&ad + &a) * i,
            ElementKind::SingleModeSqueezerRe => (&ad * &ad - &a * &a) * half,
            ElementKind::SingleModeSqueezerIm => (&a * &a + &ad * &ad) * (i * half),
            ElementKind::BeamSplitter | ElementKind::TwoModeSqueezer => {
                let id = DMatrix::<C64>::identity(d, d);
                let a1 = a.kronecker(&id);
                let a2 = id.kronecker(&a);
                let (a1d, a2d) = (a1.adjoint(), a2.adjoint());
                if self == ElementKind::BeamSplitter {
                    &a1 * &a2d - &a1d * &a2
                } else {
                    &a1d * &a2d - &a1 * &a2
                }
            }
        };
        Ok(gen * (-i))
    }
}

/// Which measurement setting an element belongs to. Untagged elements are part
/// of the state preparation and act in every round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SettingTag {
    A0,
    A1,
    B0,
    B1,
}

impl SettingTag {
    pub fn role(self) -> ModeRole {
        match self {
            SettingTag::A0 | SettingTag::A1 => ModeRole::Alice,
            SettingTag::B0 | SettingTag::B1 => ModeRole::Bob,
        }
    }

    pub fn setting(self) -> usize {
        match self {
            SettingTag::A0 | SettingTag::B0 => 0,
            SettingTag::A1 | SettingTag::B1 => 1,
        }
    }

    /// Whether an element carrying this tag acts in round `(x, y)`.
    pub fn active(self, x: usize, y: usize) -> bool {
        match self.role() {
            ModeRole::Alice => self.setting() == x,
            _ => self.setting() == y,
        }
    }
}

impl fmt::Display for SettingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One optical device placed on specific modes.
///
/// `modes` are 0-based. The value entering the unitary is `scale * raw`, which
/// lets primed variants explore much smaller parameter magnitudes with the same
/// annealing step.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    kind: ElementKind,
    modes: Vec<usize>,
    setting: Option<SettingTag>,
    scale: f64,
}

impl Element {
    pub const PRIMED_SCALE: f64 = 1e-4;

    pub fn new(kind: ElementKind, modes: &[usize], setting: Option<SettingTag>) -> Result<Self> {
        Self::with_scale(kind, modes, setting, 1.0)
    }

    pub fn with_scale(kind: ElementKind, modes: &[usize], setting: Option<SettingTag>, scale: f64) -> Result<Self> {
        if modes.len() != kind.arity() {
            return Err(FockError::WrongArity { kind, expected: kind.arity(), got: modes.len() });
        }
        if modes.len() == 2 && modes[0] == modes[1] {
            return Err(FockError::RepeatedMode(modes[0]));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(FockError::InvalidScale(scale));
        }
        if let Some(tag) = setting {
            let owner = match tag.role() {
                ModeRole::Alice => ModeSystem::ALICE,
                _ => ModeSystem::BOB,
            };
            if modes.iter().any(|m| *m != owner) {
                return Err(FockError::SettingTagMismatch { tag, modes: modes.to_vec() });
            }
        }
        Ok(Self { kind, modes: modes.to_vec(), setting, scale })
    }

    /// A setting-tagged displacement on the owner's mode.
    pub fn tagged_displacement(kind: ElementKind, tag: SettingTag) -> Self {
        assert!(kind.is_displacement());
        let mode = match tag.role() {
            ModeRole::Alice => ModeSystem::ALICE,
            _ => ModeSystem::BOB,
        };
        Self { kind, modes: vec![mode], setting: Some(tag), scale: 1.0 }
    }

    /// The eight setting-tagged displacements `DRe/DIm` x `A0, A1, B0, B1`.
    pub fn all_tagged_displacements() -> Vec<Self> {
        let mut out = Vec::with_capacity(8);
        for kind in [ElementKind::DisplacementRe, ElementKind::DisplacementIm] {
            for tag in [SettingTag::A0, SettingTag::A1, SettingTag::B0, SettingTag::B1] {
                out.push(Self::tagged_displacement(kind, tag));
            }
        }
        out
    }

    pub fn beam_splitter(m1: usize, m2: usize) -> Result<Self> {
        Self::new(ElementKind::BeamSplitter, &[m1, m2], None)
    }

    pub fn two_mode_squeezer(m1: usize, m2: usize) -> Result<Self> {
        Self::new(ElementKind::TwoModeSqueezer, &[m1, m2], None)
    }

    pub fn two_mode_squeezer_primed(m1: usize, m2: usize) -> Result<Self> {
        Self::with_scale(ElementKind::TwoModeSqueezer, &[m1, m2], None, Self::PRIMED_SCALE)
    }

    pub fn phase_shifter(mode: usize) -> Self {
        Self { kind: ElementKind::PhaseShifter, modes: vec![mode], setting: None, scale: 1.0 }
    }

    pub fn single_mode(kind: ElementKind, mode: usize) -> Result<Self> {
        Self::new(kind, &[mode], None)
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn setting(&self) -> Option<SettingTag> {
        self.setting
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Whether this element is one of the eight setting-tagged displacements
    /// that setups keep at most once.
    pub fn is_tagged_displacement(&self) -> bool {
        self.kind.is_displacement() && self.setting.is_some()
    }

    /// Whether the element acts in measurement round `(x, y)`.
    pub fn active_in(&self, x: usize, y: usize) -> bool {
        self.setting.map_or(true, |t| t.active(x, y))
    }

    pub fn validate(&self, system: &ModeSystem) -> Result<()> {
        for &m in &self.modes {
            if m >= system.n() {
                return Err(FockError::ModeOutOfRange { mode: m, n: system.n() });
            }
        }
        Ok(())
    }

    /// Human-readable label with 1-based modes, e.g. `TMS'12` or `DRe_A0`.
    pub fn label(&self) -> String {
        let mut s = self.kind.short_name().to_string();
        if self.scale != 1.0 {
            s.push('\'');
        }
        match self.setting {
            Some(tag) => {
                s.push('_');
                s.push_str(&tag.to_string());
            }
            None => {
                for m in &self.modes {
                    s.push_str(&(m + 1).to_string());
                }
            }
        }
        s
    }

    /// Unambiguous structural key; equal keys mean interchangeable elements.
    pub fn key(&self) -> String {
        let modes: Vec<String> = self.modes.iter().map(|m| (m + 1).to_string()).collect();
        let mut s = format!("{}[{}]", self.kind.short_name(), modes.join(","));
        if let Some(tag) = self.setting {
            s.push_str(&format!("_{tag}"));
        }
        if self.scale != 1.0 {
            s.push_str(&format!("@{:e}", self.scale));
        }
        s
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
