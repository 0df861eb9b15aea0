use serde::{Deserialize, Serialize};

/// `2 sqrt 2`, the largest CHSH score quantum correlations can reach.
pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Joint outcome distributions `p(a, b | A_x B_y)`.
///
/// Indexed `[x][y][a][b]`, where outcome index 0 stands for `+1` (no click)
/// and 1 for `-1` (click).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    probs: [[[[f64; 2]; 2]; 2]; 2],
}

impl CorrelationTable {
    pub fn new(probs: [[[[f64; 2]; 2]; 2]; 2]) -> Self {
        Self { probs }
    }

    /// Builds a table where every setting pair has the same distribution.
    pub fn uniform_over_settings(dist: [[f64; 2]; 2]) -> Self {
        Self { probs: [[dist; 2]; 2] }
    }

    pub fn p(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.probs[x][y][a][b]
    }

    pub fn distribution(&self, x: usize, y: usize) -> [[f64; 2]; 2] {
        self.probs[x][y]
    }

    pub fn p_equal(&self, x: usize, y: usize) -> f64 {
        self.probs[x][y][0][0] + self.probs[x][y][1][1]
    }

    pub fn p_different(&self, x: usize, y: usize) -> f64 {
        self.probs[x][y][0][1] + self.probs[x][y][1][0]
    }

    /// `E_xy = p(a = b) - p(a != b)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        self.p_equal(x, y) - self.p_different(x, y)
    }

    /// Swaps the outcome labels of Alice.
    pub fn relabel_alice(&self) -> Self {
        let mut probs = self.probs;
        for row in probs.iter_mut() {
            for dist in row.iter_mut() {
                dist.swap(0, 1);
            }
        }
        Self { probs }
    }

    /// Largest deviation from normalization over the four distributions.
    pub fn normalization_error(&self) -> f64 {
        self.probs.iter().flatten().map(|d| (d.iter().flatten().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.probs.iter().flatten().flatten().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `beta = sum_{x,y} (-1)^{xy} (p(a=b|A_x B_y) - p(a!=b|A_x B_y))`.
pub fn chsh_score(table: &CorrelationTable) -> f64 {
    let mut beta = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let sign = if x * y == 1 { -1.0 } else { 1.0 };
            beta += sign * table.correlator(x, y);
        }
    }
    beta
}
