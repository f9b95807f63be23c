//! Moments of click distributions.
//!
//! One-dimensional distributions are plain slices indexed by click number,
//! so `dist[k]` is the probability of `k` clicks.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::JointClickDistribution;

/// Normally ordered moments `⟨:π̂^m:⟩` for `m = 0..=m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalMoments {
    pub values: Vec<f64>,
}

impl NormalMoments {
    /// Whether every moment lies in `[0, 1]`, as it must for exact data.
    /// Sampled data can leave the interval; the values are kept as they are.
    pub fn in_unit_range(&self) -> bool {
        self.values.iter().all(|&v| (0.0..=1.0).contains(&v))
    }
}

/// Marginals `(c(a), c(b))`, each renormalized to unit sum.
pub fn marginals(jcd: &JointClickDistribution) -> (Vec<f64>, Vec<f64>) {
    let mut ma = Vec::with_capacity(jcd.bins_a() + 1);
    let mut mb = alloc::vec![0.0; jcd.bins_b() + 1];
    for a in 0..=jcd.bins_a() {
        let row = jcd.row(a);
        ma.push(row.iter().sum::<f64>());
        for (acc, &p) in mb.iter_mut().zip(row) {
            *acc += p;
        }
    }
    renormalize(&mut ma);
    renormalize(&mut mb);
    (ma, mb)
}

fn renormalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

/// Conditional distribution `c(b | a) = c(a, b) / c(a)`.
pub fn conditional(jcd: &JointClickDistribution, a: usize) -> Result<Vec<f64>> {
    if a > jcd.bins_a() {
        return Err(Error::UnsupportedCondition { condition: a });
    }
    let row = jcd.row(a);
    let weight: f64 = row.iter().sum();
    if !(weight > 0.0) {
        return Err(Error::UnsupportedCondition { condition: a });
    }
    Ok(row.iter().map(|&p| p / weight).collect())
}

pub fn mean(dist: &[f64]) -> f64 {
    dist.iter().enumerate().map(|(k, &p)| k as f64 * p).sum()
}

pub fn variance(dist: &[f64]) -> f64 {
    let mu = mean(dist);
    dist.iter()
        .enumerate()
        .map(|(k, &p)| {
            let d = k as f64 - mu;
            p * d * d
        })
        .sum()
}

/// `Cov(a, b) = E(ab) - E(a)E(b)`.
pub fn covariance(jcd: &JointClickDistribution) -> f64 {
    let (ma, mb) = marginals(jcd);
    let (mu_a, mu_b) = (mean(&ma), mean(&mb));
    let mut cov = 0.0;
    for a in 0..=jcd.bins_a() {
        let da = a as f64 - mu_a;
        for (b, &p) in jcd.row(a).iter().enumerate() {
            cov += p * da * (b as f64 - mu_b);
        }
    }
    cov
}

/// `E(a + b)`, the summed click number.
pub fn summed_click_mean(jcd: &JointClickDistribution) -> f64 {
    let (ma, mb) = marginals(jcd);
    mean(&ma) + mean(&mb)
}

/// `⟨:π̂^m:⟩ = Σ_k C(k, m) / C(N, m) · p(k)`: the probability that a fixed
/// set of `m` bins all fire.
pub fn normal_moment(dist: &[f64], m: usize, bins: usize) -> Result<f64> {
    if m > bins {
        return Err(Error::OrderTooLarge { order: m, bins });
    }
    if dist.len() != bins + 1 {
        return Err(Error::DimensionMismatch {
            expected: bins + 1,
            found: dist.len(),
        });
    }
    let denom = math::binomial(bins, m) as f64;
    Ok(dist
        .iter()
        .enumerate()
        .skip(m)
        .map(|(k, &p)| math::binomial(k, m) as f64 / denom * p)
        .sum())
}

pub fn normal_moments(dist: &[f64], m_max: usize, bins: usize) -> Result<NormalMoments> {
    let values = (0..=m_max)
        .map(|m| normal_moment(dist, m, bins))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalMoments { values })
}

/// Normally ordered moments of arm B conditioned on `a` clicks in arm A.
pub fn conditional_normal_moments(
    jcd: &JointClickDistribution,
    a: usize,
    m_max: usize,
) -> Result<NormalMoments> {
    if m_max > jcd.bins_b() {
        return Err(Error::OrderTooLarge {
            order: m_max,
            bins: jcd.bins_b(),
        });
    }
    normal_moments(&conditional(jcd, a)?, m_max, jcd.bins_b())
}

/// Normally ordered variance `⟨:(Δπ̂)²:⟩` from the mean and variance of
/// the click number.
pub fn normally_ordered_variance(dist: &[f64], bins: usize) -> f64 {
    let n = bins as f64;
    let mu = mean(dist);
    (n * variance(dist) - mu * (n - mu)) / (n * n * (n - 1.0))
}

/// `⟨:π̂_A π̂_B:⟩ = Σ a b c(a, b) / (N_A N_B)`.
pub fn joint_normal_moment(jcd: &JointClickDistribution) -> f64 {
    let mut s = 0.0;
    for a in 0..=jcd.bins_a() {
        for (b, &p) in jcd.row(a).iter().enumerate() {
            s += (a * b) as f64 * p;
        }
    }
    s / (jcd.bins_a() * jcd.bins_b()) as f64
}
