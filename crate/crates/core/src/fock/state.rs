use nalgebra::{DMatrix, DVector};

use super::{Element, FockError, GeneratorTable, LocalUnitary, ModeSystem, Result, Setup, TruncationConfig};
use crate::C64;

/// A normalized pure state of `n` truncated modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    d: usize,
    n: usize,
    amps: Vec<C64>,
}

impl PureState {
    pub fn vacuum(d: usize, n: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); d.pow(n as u32)];
        amps[0] = C64::new(1.0, 0.0);
        Self { d, n, amps }
    }

    pub fn from_amplitudes(d: usize, n: usize, amps: Vec<C64>) -> Result<Self> {
        let expected = d.pow(n as u32);
        if amps.len() != expected {
            return Err(FockError::DimensionMismatch { expected, got: amps.len() });
        }
        Ok(Self { d, n, amps })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn to_vector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.amps)
    }

    pub fn index_of(&self, levels: &[usize]) -> usize {
        assert_eq!(levels.len(), self.n);
        levels.iter().fold(0, |acc, &k| {
            assert!(k < self.d);
            acc * self.d + k
        })
    }

    /// Amplitude of the Fock state `|levels[0], levels[1], ...>`.
    pub fn amplitude(&self, levels: &[usize]) -> C64 {
        self.amps[self.index_of(levels)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        assert_eq!(self.amps.len(), other.amps.len());
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr()
    }

    /// Mean photon number of one mode.
    pub fn mean_photons(&self, mode: usize) -> f64 {
        let stride = self.d.pow((self.n - 1 - mode) as u32);
        self.amps.iter().enumerate().map(|(i, z)| ((i / stride) % self.d) as f64 * z.norm_sqr()).sum()
    }

    pub fn apply(&mut self, unitary: &LocalUnitary) {
        unitary.apply(&mut self.amps, self.n);
    }
}

/// Embeds an element's Hermitian generator on the full `d^n` space and
/// exponentiates it directly.
///
/// This is the dense reference construction; the simulator itself applies the
/// spectral local form from [`GeneratorTable`].
pub fn element_unitary(
    element: &Element,
    value: f64,
    trunc: &TruncationConfig,
    system: &ModeSystem,
) -> Result<DMatrix<C64>> {
    element.validate(system)?;
    if !value.is_finite() {
        return Err(FockError::NonFiniteValue(value));
    }
    let d = trunc.d();
    let n = system.n();
    let local = element.kind().local_hermitian(d)?;
    let dim = d.pow(n as u32);
    let digit = |i: usize, m: usize| (i / d.pow((n - 1 - m) as u32)) % d;
    let modes = element.modes();
    let local_index = |i: usize| modes.iter().fold(0, |acc, &m| acc * d + digit(i, m));
    let spectator_equal =
        |i: usize, j: usize| (0..n).filter(|m| !modes.contains(m)).all(|m| digit(i, m) == digit(j, m));

    let mut generator = DMatrix::<C64>::zeros(dim, dim);
    let coeff = C64::new(0.0, element.scale() * value);
    for i in 0..dim {
        for j in 0..dim {
            if spectator_equal(i, j) {
                generator[(i, j)] = coeff * local[(local_index(i), local_index(j))];
            }
        }
    }
    Ok(generator.exp())
}

/// Applies a setup to the vacuum for measurement round `(x, y)`.
///
/// Untagged elements always act; an element tagged `A_x'` acts only when
/// `x' == x` and one tagged `B_y'` only when `y' == y`. Elements act in
/// [`Setup::application_order`].
pub fn apply_setup(
    setup: &Setup,
    params: &[f64],
    settings: (usize, usize),
    trunc: &TruncationConfig,
    system: &ModeSystem,
) -> Result<PureState> {
    FockSimulator::new(system.clone(), trunc.d())?.apply_setup(setup, params, settings)
}

/// The four final states of a setup, one per measurement round.
#[derive(Debug, Clone)]
pub struct SettingBranches {
    states: [PureState; 4],
}

impl SettingBranches {
    pub fn get(&self, x: usize, y: usize) -> &PureState {
        &self.states[2 * x + y]
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &PureState)> {
        self.states.iter().enumerate().map(|(i, s)| ((i / 2, i % 2), s))
    }
}

/// Simulates setups on a fixed mode system and truncation.
#[derive(Debug)]
pub struct FockSimulator {
    system: ModeSystem,
    table: GeneratorTable,
}

impl FockSimulator {
    pub fn new(system: ModeSystem, d: usize) -> Result<Self> {
        Ok(Self { system, table: GeneratorTable::new(d)? })
    }

    pub fn system(&self) -> &ModeSystem {
        &self.system
    }

    pub fn d(&self) -> usize {
        self.table.d()
    }

    pub fn table(&self) -> &GeneratorTable {
        &self.table
    }

    pub fn vacuum(&self) -> PureState {
        PureState::vacuum(self.d(), self.system.n())
    }

    fn check(&self, setup: &Setup, params: &[f64]) -> Result<()> {
        if !setup.is_canonical() {
            return Err(FockError::NonCanonicalSetup);
        }
        if params.len() != setup.num_params() {
            return Err(FockError::ParamLengthMismatch { expected: setup.num_params(), got: params.len() });
        }
        setup.validate(&self.system)
    }

    pub fn local_unitary(&self, element: &Element, raw: f64) -> Result<LocalUnitary> {
        self.table.local_unitary(element, raw)
    }

    pub fn local_unitaries(&self, setup: &Setup, params: &[f64]) -> Result<Vec<LocalUnitary>> {
        self.check(setup, params)?;
        setup.elements().iter().zip(params).map(|(e, &p)| self.table.local_unitary(e, p)).collect()
    }

    pub fn apply_setup(&self, setup: &Setup, params: &[f64], (x, y): (usize, usize)) -> Result<PureState> {
        self.check(setup, params)?;
        let mut state = self.vacuum();
        for i in setup.application_order() {
            let element = &setup.elements()[i];
            if element.active_in(x, y) {
                state.apply(&self.table.local_unitary(element, params[i])?);
            }
        }
        Ok(state)
    }

    /// All four measurement rounds at once. Rounds share their evolution until
    /// the first element that distinguishes them.
    pub fn branches(&self, setup: &Setup, params: &[f64]) -> Result<SettingBranches> {
        let unitaries = self.local_unitaries(setup, params)?;
        Ok(self.branches_from(setup, &unitaries))
    }

    /// Like [`branches`](Self::branches) with precomputed local unitaries,
    /// one per element of `setup`.
    pub fn branches_from(&self, setup: &Setup, unitaries: &[LocalUnitary]) -> SettingBranches {
        assert_eq!(setup.len(), unitaries.len());
        // (alice setting, bob setting, state); None means "not split yet"
        let mut slots: Vec<(Option<usize>, Option<usize>, PureState)> = vec![(None, None, self.vacuum())];
        for i in setup.application_order() {
            let (element, u) = (&setup.elements()[i], &unitaries[i]);
            match element.setting() {
                None => slots.iter_mut().for_each(|(_, _, s)| s.apply(u)),
                Some(tag) => {
                    let alice = tag.role() == super::ModeRole::Alice;
                    let split = slots.iter().any(|(x, y, _)| if alice { x.is_none() } else { y.is_none() });
                    if split {
                        slots = slots
                            .into_iter()
                            .flat_map(|(x, y, s)| {
                                let t = s.clone();
                                if alice {
                                    [(Some(0), y, s), (Some(1), y, t)]
                                } else {
                                    [(x, Some(0), s), (x, Some(1), t)]
                                }
                            })
                            .collect();
                    }
                    for (x, y, s) in slots.iter_mut() {
                        let hit = if alice { *x == Some(tag.setting()) } else { *y == Some(tag.setting()) };
                        if hit {
                            s.apply(u);
                        }
                    }
                }
            }
        }
        let pick = |x: usize, y: usize| {
            slots
                .iter()
                .find(|(sx, sy, _)| sx.map_or(true, |v| v == x) && sy.map_or(true, |v| v == y))
                .map(|(_, _, s)| s.clone())
                .expect("every round is covered")
        };
        SettingBranches { states: [pick(0, 0), pick(0, 1), pick(1, 0), pick(1, 1)] }
    }
}
