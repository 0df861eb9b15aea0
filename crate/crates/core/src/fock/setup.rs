use std::collections::HashSet;

use super::{Element, ElementKind, FockError, ModeSystem, Result, SettingTag};

/// An ordered sequence of elements applied to the vacuum.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Setup {
    elements: Vec<Element>,
    canonical: bool,
}

impl Setup {
    /// The empty (canonical) setup.
    pub fn empty() -> Self {
        Self { elements: Vec::new(), canonical: true }
    }

    /// Wraps a raw element list without simplification; the canonical flag
    /// reflects whether the list already is in canonical form.
    pub fn raw(elements: Vec<Element>) -> Self {
        Self { canonical: is_canonical(&elements), elements }
    }

    /// Accepts an element list that is already canonical, failing otherwise.
    pub fn canonical(elements: Vec<Element>) -> Result<Self> {
        if !is_canonical(&elements) {
            return Err(FockError::NonCanonicalSetup);
        }
        Ok(Self { elements, canonical: true })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// Number of free real parameters, one per element.
    pub fn num_params(&self) -> usize {
        self.elements.len()
    }

    pub fn validate(&self, system: &ModeSystem) -> Result<()> {
        self.elements.iter().try_for_each(|e| e.validate(system))
    }

    /// Structural key of the whole sequence; equal for setups with identical
    /// element sequences.
    pub fn key(&self) -> String {
        self.elements.iter().map(Element::key).collect::<Vec<_>>().join(" ")
    }

    pub fn labels(&self) -> Vec<String> {
        self.elements.iter().map(Element::label).collect()
    }

    /// Indices in the order the elements act: untagged elements in sequence
    /// order, then the setting-tagged ones in sequence order. Tagged elements
    /// are the parties' measurement operations and act after the state is
    /// prepared.
    pub fn application_order(&self) -> Vec<usize> {
        let (prep, meas): (Vec<usize>, Vec<usize>) =
            (0..self.elements.len()).partition(|&i| self.elements[i].setting().is_none());
        prep.into_iter().chain(meas).collect()
    }
}

fn is_canonical(elements: &[Element]) -> bool {
    let mut seen: HashSet<(ElementKind, SettingTag)> = HashSet::new();
    for e in elements {
        if let (true, Some(tag)) = (e.kind().is_displacement(), e.setting()) {
            if !seen.insert((e.kind(), tag)) {
                return false;
            }
        }
    }
    true
}

/// Removes repeated setting-tagged displacements, keeping the first of each
/// `(kind, tag)` pair. A second copy of such a displacement commutes with
/// everything between it and the first copy, so the setup family is unchanged.
/// All other elements are kept in order.
pub fn simplify_setup(raw: &[Element]) -> Setup {
    let mut seen: HashSet<(ElementKind, SettingTag)> = HashSet::new();
    let elements = raw
        .iter()
        .filter(|e| match (e.kind().is_displacement(), e.setting()) {
            (true, Some(tag)) => seen.insert((e.kind(), tag)),
            _ => true,
        })
        .cloned()
        .collect();
    Setup { elements, canonical: true }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d_re(tag: SettingTag) -> Element {
        Element::tagged_displacement(ElementKind::DisplacementRe, tag)
    }

    #[test]
    fn duplicate_tagged_displacement_removed() {
        let s = simplify_setup(&[d_re(SettingTag::A0), d_re(SettingTag::A0)]);
        assert_eq!(s.elements(), &[d_re(SettingTag::A0)]);
        assert!(s.is_canonical());
    }

    #[test]
    fn other_duplicates_retained() {
        let bs = Element::beam_splitter(0, 1).unwrap();
        let s = simplify_setup(&[bs.clone(), bs.clone()]);
        assert_eq!(s.len(), 2);
        let untagged = Element::single_mode(ElementKind::DisplacementRe, 2).unwrap();
        assert_eq!(simplify_setup(&[untagged.clone(), untagged]).len(), 2);
    }

    #[test]
    fn empty_input() {
        let s = simplify_setup(&[]);
        assert!(s.is_empty() && s.is_canonical());
    }

    #[test]
    fn canonical_constructor_rejects_duplicates() {
        assert_eq!(
            Setup::canonical(vec![d_re(SettingTag::B1), d_re(SettingTag::B1)]),
            Err(FockError::NonCanonicalSetup)
        );
        assert!(!Setup::raw(vec![d_re(SettingTag::B1), d_re(SettingTag::B1)]).is_canonical());
    }

    #[test]
    fn re_and_im_are_distinct() {
        let im = Element::tagged_displacement(ElementKind::DisplacementIm, SettingTag::A0);
        let s = simplify_setup(&[d_re(SettingTag::A0), im, d_re(SettingTag::A1)]);
        assert_eq!(s.len(), 3);
    }
}
