//! Domain types shared by the simulator, the statistics and the criteria.
//!
//! All matrices are stored row-major with the arm-A outcome as row index and
//! the arm-B outcome as column index.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Tolerance on `Σ p = 1` for distributions built in memory.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Largest supported bin count. Click patterns are tracked as `u64` bit masks
/// and binomial coefficients must fit a `u64`.
pub const MAX_BINS: usize = 64;

/// One arm of the experiment: `bins` on-off detectors sharing the light
/// equally, each photon detected with probability `efficiency`, and each bin
/// firing on its own with probability `dark_click`.
///
/// `dark_click` is a per-bin Bernoulli probability. The linear response
/// `Γ(x) = ηx + ν'` used for on-off detectors relates to it via
/// `ν' = -ln(1 - dark_click)`; see [`DetectorConfig::response_offset`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    bins: usize,
    efficiency: f64,
    dark_click: f64,
}

impl DetectorConfig {
    pub fn new(bins: usize, efficiency: f64, dark_click: f64) -> Result<Self> {
        if !(2..=MAX_BINS).contains(&bins) {
            return Err(Error::InvalidParameter(format!(
                "bins must be in 2..={MAX_BINS}, got {bins}"
            )));
        }
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::InvalidParameter(format!(
                "efficiency must be in [0, 1], got {efficiency}"
            )));
        }
        if !(0.0..1.0).contains(&dark_click) {
            return Err(Error::InvalidParameter(format!(
                "dark_click must be in [0, 1), got {dark_click}"
            )));
        }
        Ok(Self {
            bins,
            efficiency,
            dark_click,
        })
    }

    /// Unit efficiency, no dark clicks.
    pub fn ideal(bins: usize) -> Result<Self> {
        Self::new(bins, 1.0, 0.0)
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn dark_click(&self) -> f64 {
        self.dark_click
    }

    /// Offset `ν'` of the linear response `Γ(x) = ηx + ν'` that produces the
    /// same no-click probability `e^{-ν'} = 1 - dark_click` per bin.
    pub fn response_offset(&self) -> f64 {
        -math::ln_1p(-self.dark_click)
    }
}

/// Truncated joint photon-number distribution `p(n_A, n_B)`.
///
/// Only the diagonal of the density matrix in the photon-number basis is
/// kept: the click measurement depends on `n̂` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPhotonDistribution {
    max_a: usize,
    max_b: usize,
    probs: Vec<f64>,
    label: String,
}

impl JointPhotonDistribution {
    /// Builds the distribution from unnormalized non-negative weights and
    /// renormalizes them to unit sum.
    pub fn from_weights(
        max_a: usize,
        max_b: usize,
        weights: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let expected = (max_a + 1) * (max_b + 1);
        if weights.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: weights.len(),
            });
        }
        check_non_negative(&weights)?;
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::NotNormalized { sum: total });
        }
        let probs = weights.into_iter().map(|w| w / total).collect();
        Ok(Self {
            max_a,
            max_b,
            probs,
            label: label.into(),
        })
    }

    pub fn max_a(&self) -> usize {
        self.max_a
    }

    pub fn max_b(&self) -> usize {
        self.max_b
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, n_a: usize, n_b: usize) -> f64 {
        if n_a > self.max_a || n_b > self.max_b {
            return 0.0;
        }
        self.probs[n_a * (self.max_b + 1) + n_b]
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Joint click distribution `c(a, b)` for `a = 0..=bins_a`, `b = 0..=bins_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointClickDistribution {
    bins_a: usize,
    bins_b: usize,
    probs: Vec<f64>,
}

impl JointClickDistribution {
    /// Wraps a probability matrix after checking it with
    /// [`validate_distribution`].
    pub fn new(bins_a: usize, bins_b: usize, probs: Vec<f64>) -> Result<Self> {
        check_bins(bins_a)?;
        check_bins(bins_b)?;
        let d = Self {
            bins_a,
            bins_b,
            probs,
        };
        validate_distribution(&d)?;
        Ok(d)
    }

    /// Like [`JointClickDistribution::new`] but divides by the total first,
    /// for externally supplied data that is only proportional to a
    /// distribution.
    pub fn from_weights(bins_a: usize, bins_b: usize, weights: Vec<f64>) -> Result<Self> {
        check_non_negative(&weights)?;
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::EmptyDataset);
        }
        Self::new(
            bins_a,
            bins_b,
            weights.into_iter().map(|w| w / total).collect(),
        )
    }

    pub fn bins_a(&self) -> usize {
        self.bins_a
    }

    pub fn bins_b(&self) -> usize {
        self.bins_b
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.probs[a * (self.bins_b + 1) + b]
    }

    /// Row `c(a, ·)`, not normalized.
    pub fn row(&self, a: usize) -> &[f64] {
        let width = self.bins_b + 1;
        &self.probs[a * width..(a + 1) * width]
    }

    /// Same statistics with the roles of the two arms exchanged.
    pub fn swapped(&self) -> Self {
        let mut probs = Vec::with_capacity(self.probs.len());
        for b in 0..=self.bins_b {
            for a in 0..=self.bins_a {
                probs.push(self.get(a, b));
            }
        }
        Self {
            bins_a: self.bins_b,
            bins_b: self.bins_a,
            probs,
        }
    }
}

/// Raw coincidence counts `C(a, b)` with their total `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    bins_a: usize,
    bins_b: usize,
    counts: Vec<u64>,
    total: u64,
}

impl CountMatrix {
    pub fn new(bins_a: usize, bins_b: usize, counts: Vec<u64>) -> Result<Self> {
        check_bins(bins_a)?;
        check_bins(bins_b)?;
        let expected = (bins_a + 1) * (bins_b + 1);
        if counts.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: counts.len(),
            });
        }
        let total = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::InvalidParameter("total count overflows u64".into()))?;
        Ok(Self {
            bins_a,
            bins_b,
            counts,
            total,
        })
    }

    pub fn bins_a(&self) -> usize {
        self.bins_a
    }

    pub fn bins_b(&self) -> usize {
        self.bins_b
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, a: usize, b: usize) -> u64 {
        self.counts[a * (self.bins_b + 1) + b]
    }

    pub fn row(&self, a: usize) -> &[u64] {
        let width = self.bins_b + 1;
        &self.counts[a * width..(a + 1) * width]
    }

    /// Number of shots with outcome `a` in arm A.
    pub fn row_total(&self, a: usize) -> u64 {
        self.row(a).iter().sum()
    }
}

/// Relative frequencies `C(a, b) / M`.
pub fn normalize(counts: &CountMatrix) -> Result<JointClickDistribution> {
    if counts.total == 0 {
        return Err(Error::EmptyDataset);
    }
    let total = counts.total as f64;
    let probs = counts.counts.iter().map(|&c| c as f64 / total).collect();
    JointClickDistribution::new(counts.bins_a, counts.bins_b, probs)
}

/// Checks dimensions, non-negativity and unit sum within
/// [`NORMALIZATION_TOLERANCE`].
pub fn validate_distribution(d: &JointClickDistribution) -> Result<()> {
    let expected = (d.bins_a + 1) * (d.bins_b + 1);
    if d.probs.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: d.probs.len(),
        });
    }
    check_non_negative(&d.probs)?;
    let sum: f64 = d.probs.iter().sum();
    if !((sum - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

fn check_bins(bins: usize) -> Result<()> {
    if (2..=MAX_BINS).contains(&bins) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "bins must be in 2..={MAX_BINS}, got {bins}"
        )))
    }
}

fn check_non_negative(values: &[f64]) -> Result<()> {
    match values.iter().position(|&p| !(p >= 0.0) || !p.is_finite()) {
        Some(index) => Err(Error::NegativeProbability {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}
