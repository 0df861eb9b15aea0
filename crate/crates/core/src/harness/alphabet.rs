use serde::{Deserialize, Serialize};

use super::files::ElementSpec;
use super::{HarnessError, Result};
use crate::fock::{Element, ElementKind, ModeSystem};

/// The actions available to the agent, indexed by position.
#[derive(Debug, Clone, PartialEq)]
pub struct Alphabet {
    actions: Vec<Element>,
}

impl Alphabet {
    pub fn new(actions: Vec<Element>) -> Result<Self> {
        if actions.is_empty() {
            return Err(HarnessError::Config("alphabet is empty".into()));
        }
        Ok(Self { actions })
    }

    /// Beam splitters, two-mode squeezers (plain and primed) and the eight
    /// setting-tagged displacements on three modes.
    pub fn restricted() -> Self {
        let mut actions = Element::all_tagged_displacements();
        actions.extend([
            Element::two_mode_squeezer(0, 1).unwrap(),
            Element::two_mode_squeezer(1, 2).unwrap(),
            Element::two_mode_squeezer_primed(0, 1).unwrap(),
            Element::two_mode_squeezer_primed(1, 2).unwrap(),
            Element::beam_splitter(0, 1).unwrap(),
            Element::beam_splitter(1, 2).unwrap(),
        ]);
        Self { actions }
    }

    /// The restricted alphabet plus real and imaginary single-mode
    /// squeezers on each of the three modes.
    pub fn full() -> Self {
        let mut a = Self::restricted();
        for kind in [ElementKind::SingleModeSqueezerRe, ElementKind::SingleModeSqueezerIm] {
            for m in 0..3 {
                a.actions.push(Element::single_mode(kind, m).unwrap());
            }
        }
        a
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "default" | "full" => Ok(Self::full()),
            "restricted" => Ok(Self::restricted()),
            _ => Err(HarnessError::Config(format!("unknown alphabet {name:?}"))),
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, id: usize) -> &Element {
        &self.actions[id]
    }

    pub fn actions(&self) -> &[Element] {
        &self.actions
    }

    pub fn ids(&self) -> Vec<usize> {
        (0..self.actions.len()).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.actions.iter().map(Element::label).collect()
    }

    pub fn validate(&self, system: &ModeSystem) -> Result<()> {
        for e in &self.actions {
            e.validate(system)?;
        }
        Ok(())
    }
}

/// An alphabet in a config file: a built-in name or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphabetSource {
    Named(String),
    Elements(Vec<ElementSpec>),
}

impl Default for AlphabetSource {
    fn default() -> Self {
        AlphabetSource::Named("default".into())
    }
}

impl AlphabetSource {
    pub fn build(&self) -> Result<Alphabet> {
        match self {
            AlphabetSource::Named(name) => Alphabet::by_name(name),
            AlphabetSource::Elements(specs) => {
                Alphabet::new(specs.iter().map(ElementSpec::to_element).collect::<Result<_>>()?)
            }
        }
    }
}
