//! Decomposition of seeded random ensembles, for probing the coefficient
//! region empirically.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::decompose::decompose;
use crate::error::{Error, Result};
use crate::oracle::haar_random_state;

/// Width of a bin on each `λi/λ0` axis.
pub const BIN_WIDTH: f64 = 0.05;
const BINS_PER_AXIS: u32 = 20;
/// A record violates the inequality when its residual is below this.
pub const VIOLATION_TOL: f64 = -1e-9;
const LAMBDA4_TOL: f64 = 1e-12;

/// One decomposed state. Field order is the column order of the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub state_seed: u64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4_abs: f64,
    /// In `[−π/2, π/2]`.
    pub lambda4_arg: f64,
    pub inequality_residual: f64,
}

impl ScanRecord {
    pub fn violates(&self) -> bool {
        self.inequality_residual < VIOLATION_TOL || self.lambda4_abs > self.lambda0 + LAMBDA4_TOL
    }

    pub fn bin(&self) -> [u32; 3] {
        [self.lambda1, self.lambda2, self.lambda3].map(|x| axis_bin(x / self.lambda0))
    }
}

fn axis_bin(ratio: f64) -> u32 {
    ((ratio / BIN_WIDTH).floor().max(0.0) as u32).min(BINS_PER_AXIS - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanFailure {
    pub state_seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Ordered by seed.
    pub records: Vec<ScanRecord>,
    pub failures: Vec<ScanFailure>,
}

fn record(seed: u64, config: &SolverConfig) -> Result<ScanRecord> {
    let d = decompose(&haar_random_state(seed), config)?;
    let cf = d.gsd;
    let lambda4_abs = cf.lambda4.norm();
    Ok(ScanRecord {
        state_seed: seed,
        lambda0: cf.lambda0,
        lambda1: cf.lambda1,
        lambda2: cf.lambda2,
        lambda3: cf.lambda3,
        lambda4_abs,
        lambda4_arg: if lambda4_abs > 0.0 { cf.lambda4.arg() } else { 0.0 },
        inequality_residual: d.residuals.schmidt_inequality,
    })
}

/// Decomposes the Haar-random states with seeds `base_seed .. base_seed + n`.
pub fn scan_ensemble(n: usize, base_seed: u64, config: &SolverConfig) -> Result<ScanResult> {
    if n == 0 {
        return Err(Error::InvalidConfig("scan size must be at least 1".to_string()));
    }
    config.validate()?;
    let outcomes: Vec<(u64, Result<ScanRecord>)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            (seed, record(seed, config))
        })
        .collect();
    let mut result = ScanResult { records: Vec::with_capacity(n), failures: Vec::new() };
    for (state_seed, outcome) in outcomes {
        match outcome {
            Ok(r) => result.records.push(r),
            Err(e) => result.failures.push(ScanFailure { state_seed, message: e.to_string() }),
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinStat {
    pub bin: [u32; 3],
    pub count: usize,
    pub max_lambda4_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub records: usize,
    pub failures: usize,
    pub min_lambda0_sq: f64,
    pub min_lambda0_sq_seed: Option<u64>,
    pub mean_lambda0_sq: f64,
    pub violations: usize,
    /// Non-empty bins, in lexicographic order.
    pub bins: Vec<BinStat>,
}

/// Bin holding `λ1 = λ2 = λ3 = 0`.
pub const GHZ_CORNER: [u32; 3] = [0, 0, 0];
/// Bin holding `λi/λ0 = 1/2`.
pub const W_CORNER: [u32; 3] = [10, 10, 10];

impl ScanSummary {
    pub fn from_result(result: &ScanResult) -> Self {
        let mut min = f64::INFINITY;
        let mut min_seed = None;
        let mut sum = 0.0;
        let mut bins: BTreeMap<[u32; 3], BinStat> = BTreeMap::new();
        for r in &result.records {
            let sq = r.lambda0 * r.lambda0;
            sum += sq;
            if sq < min {
                min = sq;
                min_seed = Some(r.state_seed);
            }
            let key = r.bin();
            let stat = bins.entry(key).or_insert(BinStat { bin: key, count: 0, max_lambda4_ratio: 0.0 });
            stat.count += 1;
            stat.max_lambda4_ratio = stat.max_lambda4_ratio.max(r.lambda4_abs / r.lambda0);
        }
        let n = result.records.len();
        ScanSummary {
            records: n,
            failures: result.failures.len(),
            min_lambda0_sq: min,
            min_lambda0_sq_seed: min_seed,
            mean_lambda0_sq: if n > 0 { sum / n as f64 } else { f64::NAN },
            violations: result.records.iter().filter(|r| r.violates()).count(),
            bins: bins.into_values().collect(),
        }
    }

    pub fn bin(&self, key: [u32; 3]) -> Option<&BinStat> {
        self.bins.iter().find(|b| b.bin == key)
    }

    /// Populated bin closest to `key` in the max-norm; ties go to the first in order.
    pub fn nearest_bin(&self, key: [u32; 3]) -> Option<&BinStat> {
        let dist = |b: &BinStat| (0..3).map(|i| b.bin[i].abs_diff(key[i])).max().unwrap_or(0);
        self.bins.iter().min_by_key(|b| dist(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_scan_is_ordered_and_clean() {
        let result = scan_ensemble(24, 7, &SolverConfig::default()).unwrap();
        assert!(result.failures.is_empty());
        let seeds: Vec<u64> = result.records.iter().map(|r| r.state_seed).collect();
        assert_eq!(seeds, (7..31).collect::<Vec<_>>());
        for r in &result.records {
            assert!(!r.violates());
            assert!(r.lambda4_arg.abs() <= std::f64::consts::FRAC_PI_2 + 1e-15);
            let n2 = r.lambda0.powi(2) + r.lambda1.powi(2) + r.lambda2.powi(2) + r.lambda3.powi(2) + r.lambda4_abs.powi(2);
            assert!((n2 - 1.0).abs() < 1e-9);
        }
        let summary = ScanSummary::from_result(&result);
        assert_eq!(summary.violations, 0);
        assert!(summary.min_lambda0_sq >= 4.0 / 9.0 - 1e-6);
        assert_eq!(summary.bins.iter().map(|b| b.count).sum::<usize>(), 24);
        let near = summary.nearest_bin(GHZ_CORNER).unwrap();
        assert!(summary.bins.iter().all(|b| b.bin.iter().max() >= near.bin.iter().max()));
    }

    #[test]
    fn scan_is_deterministic() {
        let a = scan_ensemble(8, 100, &SolverConfig::default()).unwrap();
        let b = scan_ensemble(8, 100, &SolverConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn binning() {
        assert_eq!(axis_bin(0.0), 0);
        assert_eq!(axis_bin(0.5), 10);
        assert_eq!(axis_bin(0.0499), 0);
        assert_eq!(axis_bin(1.0), 19);
        assert_eq!(axis_bin(-1e-17), 0);
    }

    #[test]
    fn zero_size_rejected() {
        assert!(scan_ensemble(0, 0, &SolverConfig::default()).is_err());
    }
}
