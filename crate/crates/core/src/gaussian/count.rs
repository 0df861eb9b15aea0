use super::{GaussianError, Result};

/// A measuring party: number of settings and number of received modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Party {
    pub settings: usize,
    pub modes: usize,
}

/// Real parameters of the most general setup: `n^2 + 2n` for the state plus
/// `(N - 1)(2k^2 + 2k)` for every party with `N` settings on `k` modes.
pub fn parameter_count(n: usize, parties: &[Party]) -> Result<usize> {
    let received: usize = parties.iter().map(|p| p.modes).sum();
    if received > n {
        return Err(GaussianError::InvalidParty(format!("{received} received modes exceed {n}")));
    }
    if let Some(p) = parties.iter().find(|p| p.settings == 0) {
        return Err(GaussianError::InvalidParty(format!("{p:?} has no settings")));
    }
    let settings: usize = parties.iter().map(|p| (p.settings - 1) * (2 * p.modes * p.modes + 2 * p.modes)).sum();
    Ok(n * n + 2 * n + settings)
}

/// Two parties with two settings each.
pub fn chsh_count(n: usize, k_a: usize, k_b: usize) -> Result<usize> {
    if k_a + k_b > n {
        return Err(GaussianError::InvalidParty(format!("{} received modes exceed {n}", k_a + k_b)));
    }
    Ok(n * n + 2 * n + 2 * (k_a * k_a + k_a) + 2 * (k_b * k_b + k_b))
}
