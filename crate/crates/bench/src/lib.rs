//! Fixtures shared by the benchmarks.

use bellforge::fock::{Element, Setup};

/// Two-mode squeezer followed by the eight setting-tagged displacements.
pub fn fig2a_setup() -> Setup {
    let mut elements = vec![Element::two_mode_squeezer(0, 1).unwrap()];
    elements.extend(Element::all_tagged_displacements());
    Setup::canonical(elements).unwrap()
}

/// Heralded single-photon setup: TMS23, BS12 and four displacements.
pub fn fig2d_setup() -> Setup {
    let d = Element::all_tagged_displacements();
    Setup::canonical(vec![
        Element::two_mode_squeezer(1, 2).unwrap(),
        Element::beam_splitter(0, 1).unwrap(),
        d[0].clone(),
        d[2].clone(),
        d[3].clone(),
        d[6].clone(),
    ])
    .unwrap()
}

pub fn params(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.1 + 0.05 * i as f64).collect()
}
