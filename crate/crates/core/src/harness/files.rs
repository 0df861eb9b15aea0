use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{HarnessError, Result};
use crate::fock::{Element, ElementKind, SettingTag, Setup};

pub const FORMAT_VERSION: u32 = 1;

/// File form of one element. Modes are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementSpec {
    pub kind: String,
    pub modes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting_tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

fn parse_kind(name: &str) -> Result<ElementKind> {
    ElementKind::ALL
        .into_iter()
        .find(|k| k.short_name().eq_ignore_ascii_case(name) || format!("{k:?}").eq_ignore_ascii_case(name))
        .ok_or_else(|| HarnessError::Format(format!("unknown element kind {name:?}")))
}

fn parse_tag(name: &str) -> Result<SettingTag> {
    [SettingTag::A0, SettingTag::A1, SettingTag::B0, SettingTag::B1]
        .into_iter()
        .find(|t| t.to_string().eq_ignore_ascii_case(name))
        .ok_or_else(|| HarnessError::Format(format!("unknown setting tag {name:?}")))
}

impl ElementSpec {
    pub fn to_element(&self) -> Result<Element> {
        let kind = parse_kind(&self.kind)?;
        if self.modes.contains(&0) {
            return Err(HarnessError::Format(format!("modes are 1-based, got {:?}", self.modes)));
        }
        let modes: Vec<usize> = self.modes.iter().map(|m| m - 1).collect();
        let tag = self.setting_tag.as_deref().map(parse_tag).transpose()?;
        Ok(Element::with_scale(kind, &modes, tag, self.scale.unwrap_or(1.0))?)
    }

    pub fn from_element(e: &Element) -> Self {
        Self {
            kind: e.kind().short_name().to_string(),
            modes: e.modes().iter().map(|m| m + 1).collect(),
            setting_tag: e.setting().map(|t| t.to_string()),
            scale: (e.scale() != 1.0).then_some(e.scale()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetupFile {
    pub version: u32,
    pub elements: Vec<ElementSpec>,
}

impl SetupFile {
    pub fn from_setup(setup: &Setup) -> Self {
        Self { version: FORMAT_VERSION, elements: setup.elements().iter().map(ElementSpec::from_element).collect() }
    }

    /// The setup after removing repeated tagged displacements.
    pub fn to_setup(&self) -> Result<Setup> {
        check_version(self.version)?;
        let elements = self.elements.iter().map(ElementSpec::to_element).collect::<Result<Vec<_>>>()?;
        Ok(Setup::canonical(elements)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub version: u32,
    pub params: Vec<f64>,
}

impl ParamsFile {
    pub fn new(params: Vec<f64>) -> Self {
        Self { version: FORMAT_VERSION, params }
    }
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(HarnessError::Format(format!("unsupported file version {v}")));
    }
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Format(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

pub fn load_setup(path: &Path) -> Result<Setup> {
    read_json::<SetupFile>(path)?.to_setup()
}

pub fn save_setup(path: &Path, setup: &Setup) -> Result<()> {
    write_json(path, &SetupFile::from_setup(setup))
}

pub fn load_params(path: &Path) -> Result<Vec<f64>> {
    let file: ParamsFile = read_json(path)?;
    check_version(file.version)?;
    Ok(file.params)
}

pub fn save_params(path: &Path, params: &[f64]) -> Result<()> {
    write_json(path, &ParamsFile::new(params.to_vec()))
}
