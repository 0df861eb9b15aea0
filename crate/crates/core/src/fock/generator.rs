use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{Element, ElementKind, FockError, Result};
use crate::C64;

/// Spectral form `K = V diag(lambda) V^dag` of an element's Hermitian generator,
/// so that `exp(i v K) = V diag(e^{i v lambda}) V^dag` is unitary to machine
/// precision for any `v`.
#[derive(Debug, Clone)]
pub struct LocalGenerator {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl LocalGenerator {
    pub fn new(kind: ElementKind, d: usize) -> Result<Self> {
        let k = kind.local_hermitian(d)?;
        let eig = SymmetricEigen::new(k);
        Ok(Self { eigenvalues: eig.eigenvalues.iter().copied().collect(), eigenvectors: eig.eigenvectors })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `exp(i value K)` as a dense local matrix.
    pub fn unitary(&self, value: f64) -> DMatrix<C64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (c, l) in self.eigenvalues.iter().enumerate() {
            let phase = C64::from_polar(1.0, value * l);
            scaled.column_mut(c).iter_mut().for_each(|z| *z *= phase);
        }
        scaled * v.adjoint()
    }
}

/// Lazily built generators for every element kind at one truncation dimension.
#[derive(Debug)]
pub struct GeneratorTable {
    d: usize,
    slots: [OnceLock<LocalGenerator>; 7],
}

impl GeneratorTable {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(FockError::InvalidDimension(d));
        }
        Ok(Self { d, slots: Default::default() })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generator(&self, kind: ElementKind) -> &LocalGenerator {
        self.slots[kind.index()]
            .get_or_init(|| LocalGenerator::new(kind, self.d).expect("dimension validated at construction"))
    }

    pub fn local_unitary(&self, element: &Element, raw: f64) -> Result<LocalUnitary> {
        if !raw.is_finite() {
            return Err(FockError::NonFiniteValue(raw));
        }
        let matrix = self.generator(element.kind()).unitary(element.scale() * raw);
        Ok(LocalUnitary { modes: element.modes().to_vec(), d: self.d, matrix })
    }
}

/// An element's unitary on its own one or two modes, not yet embedded.
#[derive(Debug, Clone)]
pub struct LocalUnitary {
    modes: Vec<usize>,
    d: usize,
    matrix: DMatrix<C64>,
}

impl LocalUnitary {
    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Applies the unitary in place to an `n`-mode amplitude vector.
    pub fn apply(&self, amps: &mut [C64], n: usize) {
        let d = self.d;
        let stride = |m: usize| d.pow((n - 1 - m) as u32);
        // offsets of local basis states relative to a base index with zero
        // occupation on the acted modes
        let offsets: Vec<usize> = match self.modes[..] {
            [m] => (0..d).map(|k| k * stride(m)).collect(),
            [p, q] => {
                let (sp, sq) = (stride(p), stride(q));
                (0..d * d).map(|k| (k / d) * sp + (k % d) * sq).collect()
            }
            _ => unreachable!("elements act on one or two modes"),
        };
        let total = amps.len();
        let dim = offsets.len();
        let mut local = vec![C64::new(0.0, 0.0); dim];
        let mut out = vec![C64::new(0.0, 0.0); dim];
        let m = &self.matrix;
        for base in 0..total {
            if !self.is_base(base, n) {
                continue;
            }
            for (slot, off) in local.iter_mut().zip(&offsets) {
                *slot = amps[base + off];
            }
            if local.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (c, l) in local.iter().enumerate() {
                    acc += m[(r, c)] * l;
                }
                *o = acc;
            }
            for (o, off) in out.iter().zip(&offsets) {
                amps[base + off] = *o;
            }
        }
    }

    fn is_base(&self, index: usize, n: usize) -> bool {
        self.modes.iter().all(|&m| (index / self.d.pow((n - 1 - m) as u32)) % self.d == 0)
    }
}
