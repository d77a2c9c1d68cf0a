use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Knobs for the multistart stationary-point search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Overlap increment per sweep below which a restart may stop.
    pub tol_convergence: f64,
    /// Stationarity residual at acceptance, also the dedup fidelity gap.
    pub tol_match: f64,
    pub max_sweeps: usize,
    /// Random restarts, in addition to the eight computational-basis starts.
    pub n_restarts: usize,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_convergence: 1e-12,
            tol_match: 1e-8,
            max_sweeps: 10_000,
            n_restarts: 64,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_restarts(mut self, n: usize) -> Self {
        self.n_restarts = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_convergence > 0.0 && self.tol_convergence.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol_convergence must be > 0, got {}", self.tol_convergence)));
        }
        if !(self.tol_match > 0.0 && self.tol_match < 1.0) {
            return Err(Error::InvalidConfig(format!("tol_match must be in (0, 1), got {}", self.tol_match)));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be at least 1".into()));
        }
        if self.n_restarts == 0 {
            return Err(Error::InvalidConfig("n_restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SolverConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let base = SolverConfig::default();
        for bad in [
            SolverConfig { tol_convergence: 0.0, ..base },
            SolverConfig { tol_match: -1.0, ..base },
            SolverConfig { max_sweeps: 0, ..base },
            SolverConfig { n_restarts: 0, ..base },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
    }
}
