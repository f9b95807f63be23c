//! Exact and sampled click statistics for two-mode photon-number states.
//!
//! Each arm is a uniform `N`-fold splitter followed by on-off detectors. A
//! photon lands in one of the `N` bins with equal probability and is detected
//! with probability `η`; every bin additionally fires on its own with
//! probability `ν`. The number of firing bins is the recorded outcome.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{CountMatrix, DetectorConfig, JointClickDistribution, JointPhotonDistribution};
use crate::sampling::{multinomial, stream_rng};

/// Probability mass allowed outside the photon-number truncation.
pub const TRUNCATION_TAIL: f64 = 1e-12;

/// Shots simulated per random stream in [`sample_counts_physical`].
pub const PHYSICAL_CHUNK: u64 = 1 << 16;

/// Two-mode state families.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// Product of coherent states with mean photon numbers `|α|²`, `|β|²`.
    Coherent {
        mean_a: f64,
        mean_b: f64,
    },
    /// Two-mode squeezed vacuum `√(1-λ²) Σ λⁿ |n⟩|n⟩`.
    Tmsv {
        lambda: f64,
    },
    /// A single photon split as `t|1,0⟩ + √(1-t²)|0,1⟩`.
    SplitPhoton {
        t: f64,
    },
    Custom(JointPhotonDistribution),
}

impl StateSpec {
    /// Squeezed vacuum parameterized by `λ²`, the ratio of successive pair
    /// probabilities.
    pub fn tmsv_from_lambda2(lambda2: f64) -> Self {
        StateSpec::Tmsv {
            lambda: math::sqrt(lambda2),
        }
    }

    /// Split photon parameterized by the probability `t²` of finding it in
    /// arm A.
    pub fn split_photon_from_t2(t2: f64) -> Self {
        StateSpec::SplitPhoton { t: math::sqrt(t2) }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StateSpec::Coherent { mean_a, mean_b } => {
                for (name, mean) in [("mean_a", mean_a), ("mean_b", mean_b)] {
                    if !(mean >= 0.0) || !mean.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "{name} must be a finite non-negative number, got {mean}"
                        )));
                    }
                }
                Ok(())
            }
            StateSpec::Tmsv { lambda } => open_unit("lambda", lambda),
            StateSpec::SplitPhoton { t } => open_unit("t", t),
            StateSpec::Custom(_) => Ok(()),
        }
    }
}

fn open_unit(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie in (0, 1), got {value}"
        )))
    }
}

/// Photon-number content of `spec`, truncated where the discarded tail mass
/// drops below [`TRUNCATION_TAIL`] and renormalized.
pub fn build_photon_distribution(spec: &StateSpec) -> Result<JointPhotonDistribution> {
    spec.validate()?;
    match spec {
        StateSpec::Coherent { mean_a, mean_b } => {
            let pa = poisson_truncated(*mean_a);
            let pb = poisson_truncated(*mean_b);
            let mut weights = Vec::with_capacity(pa.len() * pb.len());
            for &x in &pa {
                weights.extend(pb.iter().map(|&y| x * y));
            }
            JointPhotonDistribution::from_weights(
                pa.len() - 1,
                pb.len() - 1,
                weights,
                format!("coherent(mean_a={mean_a}, mean_b={mean_b})"),
            )
        }
        StateSpec::Tmsv { lambda } => {
            let l2 = lambda * lambda;
            // Σ_{n>K} (1-λ²)λ^{2n} = λ^{2(K+1)}
            let mut max = 0usize;
            let mut tail = l2;
            while tail >= TRUNCATION_TAIL {
                max += 1;
                tail *= l2;
            }
            let dim = max + 1;
            let mut weights = vec![0.0; dim * dim];
            let mut p = 1.0 - l2;
            for n in 0..dim {
                weights[n * dim + n] = p;
                p *= l2;
            }
            JointPhotonDistribution::from_weights(
                max,
                max,
                weights,
                format!("tmsv(lambda={lambda})"),
            )
        }
        StateSpec::SplitPhoton { t } => {
            let t2 = t * t;
            // (n_a, n_b) in {0,1}²: [p00, p01, p10, p11]
            JointPhotonDistribution::from_weights(
                1,
                1,
                vec![0.0, 1.0 - t2, t2, 0.0],
                format!("split_photon(t={t})"),
            )
        }
        StateSpec::Custom(jpd) => Ok(jpd.clone()),
    }
}

/// Poisson probabilities up to the first `K ≥ mean` whose tail is below
/// [`TRUNCATION_TAIL`].
fn poisson_truncated(mean: f64) -> Vec<f64> {
    if mean == 0.0 {
        return vec![1.0];
    }
    let ln_mean = math::ln(mean);
    let pmf = |n: usize| math::exp(-mean + n as f64 * ln_mean - math::ln_gamma(n as f64 + 1.0));
    let mut probs = Vec::new();
    let mut n = 0usize;
    loop {
        probs.push(pmf(n));
        let next = n + 1;
        if (next as f64) + 1.0 > mean {
            // geometric bound on Σ_{j>n} p(j) once the ratio μ/(j+1) < 1
            let ratio = mean / (next as f64 + 1.0);
            let bound = pmf(next) / (1.0 - ratio);
            if bound < TRUNCATION_TAIL {
                break;
            }
        }
        n = next;
    }
    probs
}

/// Click-number distribution `K(a | n)`, `a = 0..=N`, for `n` photons in one
/// arm.
pub fn fock_click_kernel(n: usize, cfg: &DetectorConfig) -> Vec<f64> {
    fock_click_kernels(n, cfg)
        .pop()
        .expect("at least one kernel")
}

/// Kernels `K(· | n)` for every `n = 0..=max_n`.
///
/// Detected photons are dropped into bins one at a time: with `k` bins
/// already fired, the next photon fires a new bin with probability
/// `η(N-k)/N`. Dark clicks then fire each of the `N-k` remaining bins
/// independently with probability `ν`. This is the same distribution as the
/// inclusion-exclusion sum over sets of silent bins,
/// `C(N,a) Σ_j (-1)^j C(a,j) (1-ν)^{N-a+j} (1-(N-a+j)η/N)^n`, but every term
/// is non-negative so there is no cancellation for large `N`.
pub fn fock_click_kernels(max_n: usize, cfg: &DetectorConfig) -> Vec<Vec<f64>> {
    let bins = cfg.bins();
    let eta = cfg.efficiency();
    let dark = dark_click_table(cfg);

    let mut fired = vec![0.0; bins + 1];
    fired[0] = 1.0;
    let mut kernels = Vec::with_capacity(max_n + 1);
    for n in 0..=max_n {
        if n > 0 {
            for k in (0..bins).rev() {
                let step = eta * (bins - k) as f64 / bins as f64;
                let moved = fired[k] * step;
                fired[k] -= moved;
                fired[k + 1] += moved;
            }
        }
        let mut kernel = vec![0.0; bins + 1];
        for (k, &pk) in fired.iter().enumerate() {
            if pk == 0.0 {
                continue;
            }
            for (d, &pd) in dark[k].iter().enumerate() {
                kernel[k + d] += pk * pd;
            }
        }
        kernels.push(kernel);
    }
    kernels
}

/// `dark[k][d]`: probability that `d` of the `N-k` unfired bins dark-click.
fn dark_click_table(cfg: &DetectorConfig) -> Vec<Vec<f64>> {
    let bins = cfg.bins();
    let nu = cfg.dark_click();
    (0..=bins)
        .map(|k| {
            let free = bins - k;
            (0..=free)
                .map(|d| {
                    math::binomial(free, d) as f64
                        * math::powi(nu, d as u32)
                        * math::powi(1.0 - nu, (free - d) as u32)
                })
                .collect()
        })
        .collect()
}

/// `c(a, b) = Σ p(n_A, n_B) K_A(a | n_A) K_B(b | n_B)`.
pub fn joint_click_distribution(
    jpd: &JointPhotonDistribution,
    cfg_a: &DetectorConfig,
    cfg_b: &DetectorConfig,
) -> Result<JointClickDistribution> {
    let ka = fock_click_kernels(jpd.max_a(), cfg_a);
    let kb = fock_click_kernels(jpd.max_b(), cfg_b);
    let (na, nb) = (cfg_a.bins(), cfg_b.bins());

    // First contract over n_B: t[n_A][b] = Σ_{n_B} p(n_A, n_B) K_B(b | n_B).
    let mut partial = vec![0.0; (jpd.max_a() + 1) * (nb + 1)];
    for n_a in 0..=jpd.max_a() {
        let row = &mut partial[n_a * (nb + 1)..(n_a + 1) * (nb + 1)];
        for (n_b, kernel) in kb.iter().enumerate() {
            let p = jpd.get(n_a, n_b);
            if p == 0.0 {
                continue;
            }
            for (slot, &k) in row.iter_mut().zip(kernel) {
                *slot += p * k;
            }
        }
    }
    let mut probs = vec![0.0; (na + 1) * (nb + 1)];
    for (n_a, kernel) in ka.iter().enumerate() {
        let row = &partial[n_a * (nb + 1)..(n_a + 1) * (nb + 1)];
        for (a, &k) in kernel.iter().enumerate() {
            if k == 0.0 {
                continue;
            }
            let out = &mut probs[a * (nb + 1)..(a + 1) * (nb + 1)];
            for (slot, &t) in out.iter_mut().zip(row) {
                *slot += k * t;
            }
        }
    }
    JointClickDistribution::from_weights(na, nb, probs)
}

/// Multinomial sample of `shots` outcomes from `jcd`.
pub fn sample_counts(jcd: &JointClickDistribution, shots: u64, seed: u64) -> Result<CountMatrix> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let mut counts = vec![0u64; jcd.probs().len()];
    multinomial(&mut rng, shots, jcd.probs(), &mut counts);
    CountMatrix::new(jcd.bins_a(), jcd.bins_b(), counts)
}

/// Shot-by-shot simulation of the detector: draw a photon pair, scatter each
/// photon into a random bin, keep it with probability `η`, add dark clicks,
/// and count firing bins.
///
/// Shots are generated in chunks of [`PHYSICAL_CHUNK`], chunk `i` drawing
/// from stream `i` of `seed`; see [`sample_physical_chunk`].
pub fn sample_counts_physical(
    jpd: &JointPhotonDistribution,
    cfg_a: &DetectorConfig,
    cfg_b: &DetectorConfig,
    shots: u64,
    seed: u64,
) -> Result<CountMatrix> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let sampler = PhysicalSampler::new(jpd, *cfg_a, *cfg_b);
    let mut counts = vec![0u64; (cfg_a.bins() + 1) * (cfg_b.bins() + 1)];
    let chunks = shots.div_ceil(PHYSICAL_CHUNK);
    for chunk in 0..chunks {
        let len = PHYSICAL_CHUNK.min(shots - chunk * PHYSICAL_CHUNK);
        sampler.run_chunk(seed, chunk, len, &mut counts);
    }
    CountMatrix::new(cfg_a.bins(), cfg_b.bins(), counts)
}

/// Counts for chunk `chunk` of a physical simulation, for callers that
/// spread the chunks over threads. Summing chunks `0..⌈shots/PHYSICAL_CHUNK⌉`
/// (the last one shortened) reproduces [`sample_counts_physical`].
pub fn sample_physical_chunk(
    jpd: &JointPhotonDistribution,
    cfg_a: &DetectorConfig,
    cfg_b: &DetectorConfig,
    seed: u64,
    chunk: u64,
    len: u64,
) -> Vec<u64> {
    let sampler = PhysicalSampler::new(jpd, *cfg_a, *cfg_b);
    let mut counts = vec![0u64; (cfg_a.bins() + 1) * (cfg_b.bins() + 1)];
    sampler.run_chunk(seed, chunk, len, &mut counts);
    counts
}

struct PhysicalSampler<'a> {
    jpd: &'a JointPhotonDistribution,
    cumulative: Vec<f64>,
    cfg_a: DetectorConfig,
    cfg_b: DetectorConfig,
}

impl<'a> PhysicalSampler<'a> {
    fn new(jpd: &'a JointPhotonDistribution, cfg_a: DetectorConfig, cfg_b: DetectorConfig) -> Self {
        let mut acc = 0.0;
        let cumulative = jpd
            .probs()
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        Self {
            jpd,
            cumulative,
            cfg_a,
            cfg_b,
        }
    }

    fn run_chunk(&self, seed: u64, chunk: u64, len: u64, counts: &mut [u64]) {
        let mut rng = stream_rng(seed, chunk);
        let width = self.cfg_b.bins() + 1;
        let last = self.cumulative.len() - 1;
        let total = self.cumulative[last];
        for _ in 0..len {
            let u: f64 = rng.random::<f64>() * total;
            let cell = self.cumulative.partition_point(|&c| c <= u).min(last);
            let n_a = cell / (self.jpd.max_b() + 1);
            let n_b = cell % (self.jpd.max_b() + 1);
            let a = detect(&mut rng, n_a, &self.cfg_a);
            let b = detect(&mut rng, n_b, &self.cfg_b);
            counts[a * width + b] += 1;
        }
    }
}

/// Number of firing bins for `photons` photons hitting one detector.
fn detect<R: Rng + ?Sized>(rng: &mut R, photons: usize, cfg: &DetectorConfig) -> usize {
    let bins = cfg.bins();
    let mut fired = 0u64;
    for _ in 0..photons {
        let bin = rng.random_range(0..bins);
        if rng.random::<f64>() < cfg.efficiency() {
            fired |= 1 << bin;
        }
    }
    if cfg.dark_click() > 0.0 {
        for bin in 0..bins {
            if rng.random::<f64>() < cfg.dark_click() {
                fired |= 1 << bin;
            }
        }
    }
    fired.count_ones() as usize
}
