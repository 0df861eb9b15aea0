use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{BellError, Result};
use crate::C64;

/// A non-photon-number-resolving detector where each photon is registered
/// independently with probability `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    eta: f64,
}

impl DetectorModel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(BellError::InvalidEfficiency(eta));
        }
        Ok(Self { eta })
    }

    pub fn perfect() -> Self {
        Self { eta: 1.0 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Diagonal of `P_no_click = (1 - eta)^{a^dag a}`.
    pub fn no_click_weights(&self, d: usize) -> Vec<f64> {
        (0..d).map(|k| (1.0 - self.eta).powi(k as i32)).collect()
    }

    /// Diagonal of `P_click = 1 - P_no_click`.
    pub fn click_weights(&self, d: usize) -> Vec<f64> {
        self.no_click_weights(d).into_iter().map(|w| 1.0 - w).collect()
    }

    /// `(P_click, P_no_click)` as dense `d x d` matrices.
    pub fn povm(&self, d: usize) -> (DMatrix<C64>, DMatrix<C64>) {
        let diag = |w: Vec<f64>| {
            DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, w.into_iter().map(|x| C64::new(x, 0.0))))
        };
        (diag(self.click_weights(d)), diag(self.no_click_weights(d)))
    }
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::perfect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_efficiency_projects_on_vacuum() {
        let (click, no_click) = DetectorModel::perfect().povm(4);
        for k in 0..4 {
            let vac = if k == 0 { 1.0 } else { 0.0 };
            assert_eq!(no_click[(k, k)].re, vac);
            assert_eq!(click[(k, k)].re, 1.0 - vac);
        }
    }

    #[test]
    fn zero_efficiency_never_clicks() {
        let (click, no_click) = DetectorModel::new(0.0).unwrap().povm(5);
        assert_eq!(no_click, DMatrix::identity(5, 5));
        assert!(click.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn half_efficiency_level_two() {
        let (_, no_click) = DetectorModel::new(0.5).unwrap().povm(4);
        assert_eq!(no_click[(2, 2)].re, 0.25);
    }

    #[test]
    fn completeness_and_positivity() {
        for eta in [0.0, 0.1, 0.37, 0.9, 1.0] {
            let m = DetectorModel::new(eta).unwrap();
            for (c, n) in m.click_weights(11).iter().zip(m.no_click_weights(11)) {
                assert!((c + n - 1.0).abs() <= 1e-14);
                assert!(*c >= 0.0 && n >= 0.0);
            }
        }
    }

    #[test]
    fn rejects_out_of_range_efficiency() {
        assert_eq!(DetectorModel::new(1.2), Err(BellError::InvalidEfficiency(1.2)));
        assert!(DetectorModel::new(-0.1).is_err());
    }
}
