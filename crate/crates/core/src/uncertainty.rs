//! Nonparametric bootstrap over the joint count matrix.
//!
//! Each replicate redraws `M` shots from the empirical `C(a, b) / M` and
//! recomputes every statistic from the resampled matrix, so correlations
//! between numerators and denominators of conditional quantities are carried
//! along automatically. Replicate `i` uses stream `i` of the configured seed;
//! the result is the same whether replicates run serially or in parallel.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::criteria::Statistic;
use crate::error::{Error, Result};
use crate::math;
use crate::model::{normalize, CountMatrix};
use crate::sampling::{multinomial, stream_rng};

pub const DEFAULT_REPLICATES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub seed: u64,
    /// Statistics to resample.
    pub statistics: Vec<Statistic>,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            statistics: Statistic::ALL.to_vec(),
        }
    }
}

impl BootstrapConfig {
    pub fn new(replicates: usize, seed: u64) -> Self {
        Self {
            replicates,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::InvalidParameter(format!(
                "bootstrap needs at least 2 replicates, got {}",
                self.replicates
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatisticError {
    pub statistic: Statistic,
    /// Sample standard deviation over replicates where the statistic was
    /// defined; `None` if it was undefined on more than half of them.
    pub stderr: Option<f64>,
    pub defined_replicates: usize,
    pub drop_fraction: f64,
}

impl StatisticError {
    pub fn flagged(&self) -> bool {
        self.stderr.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSummary {
    pub replicates: usize,
    pub seed: u64,
    pub shots: u64,
    pub entries: Vec<StatisticError>,
}

impl BootstrapSummary {
    pub fn get(&self, statistic: Statistic) -> Option<&StatisticError> {
        self.entries.iter().find(|e| e.statistic == statistic)
    }

    pub fn stderr(&self, statistic: Statistic) -> Option<f64> {
        self.get(statistic).and_then(|e| e.stderr)
    }
}

/// One multinomial redraw of `counts.total()` shots from the empirical
/// frequencies.
pub fn resample<R: Rng + ?Sized>(counts: &CountMatrix, rng: &mut R) -> CountMatrix {
    let total = counts.total() as f64;
    let probs: Vec<f64> = counts.counts().iter().map(|&c| c as f64 / total).collect();
    let mut out = vec![0u64; probs.len()];
    multinomial(rng, counts.total(), &probs, &mut out);
    CountMatrix::new(counts.bins_a(), counts.bins_b(), out).expect("same shape as the input")
}

/// Statistics of replicate `index`, in the order of `cfg.statistics`.
pub fn replicate(counts: &CountMatrix, cfg: &BootstrapConfig, index: usize) -> Vec<Option<f64>> {
    let mut rng = stream_rng(cfg.seed, index as u64);
    let sample = resample(counts, &mut rng);
    let Ok(jcd) = normalize(&sample) else {
        return vec![None; cfg.statistics.len()];
    };
    cfg.statistics
        .iter()
        .map(|s| s.evaluate(&jcd).ok())
        .collect()
}

/// Reduces per-replicate values (one row per replicate) to standard errors.
pub fn summarize(
    counts: &CountMatrix,
    cfg: &BootstrapConfig,
    replicates: &[Vec<Option<f64>>],
) -> BootstrapSummary {
    let entries = cfg
        .statistics
        .iter()
        .enumerate()
        .map(|(k, &statistic)| {
            let values: Vec<f64> = replicates.iter().filter_map(|r| r[k]).collect();
            let defined = values.len();
            let drop_fraction = 1.0 - defined as f64 / replicates.len().max(1) as f64;
            let stderr =
                (2 * defined >= replicates.len() && defined >= 2).then(|| sample_std(&values));
            StatisticError {
                statistic,
                stderr,
                defined_replicates: defined,
                drop_fraction,
            }
        })
        .collect();
    BootstrapSummary {
        replicates: replicates.len(),
        seed: cfg.seed,
        shots: counts.total(),
        entries,
    }
}

/// Serial bootstrap of every configured statistic.
pub fn bootstrap(counts: &CountMatrix, cfg: &BootstrapConfig) -> Result<BootstrapSummary> {
    cfg.validate()?;
    if counts.total() == 0 {
        return Err(Error::EmptyDataset);
    }
    let rows: Vec<_> = (0..cfg.replicates)
        .map(|i| replicate(counts, cfg, i))
        .collect();
    Ok(summarize(counts, cfg, &rows))
}

fn sample_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    math::sqrt(ss / (n - 1.0))
}
