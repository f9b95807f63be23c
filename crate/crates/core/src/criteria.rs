//! Nonclassicality criteria for joint click statistics and their classical
//! bounds.
//!
//! Every bound below holds for arbitrary mixtures of coherent states and any
//! detector response, so a violation certifies nonclassical light directly
//! from the measured `c(a, b)`:
//!
//! * `Q ≥ 0` for each arm (sub-binomial light otherwise);
//! * `κ ≤ κ^cl.max` for the conditional correlation coefficient;
//! * `|γ| ≤ γ^cl.max` for Pearson's coefficient;
//! * `𝔑 ≥ 0` for the smallest eigenvalue of the conditional moment matrices.

use alloc::vec::Vec;

use crate::eigen;
use crate::error::{Error, Result};
use crate::model::{normalize, CountMatrix, JointClickDistribution};
use crate::stats::{self, conditional, marginals, mean, variance};
use crate::uncertainty::BootstrapSummary;

/// Default significance multiplier for verdicts.
pub const DEFAULT_THRESHOLD: f64 = 3.0;

/// A violation must also exceed this absolute margin, so that exact
/// distributions sitting on a bound are not flagged by rounding.
pub const NUMERICAL_FLOOR: f64 = 1e-10;

/// Binomial `Q = N Var(k) / (E(k)(N - E(k))) - 1` of a single-arm click
/// distribution. Zero for binomial statistics, negative only for
/// nonclassical light.
pub fn binomial_q(marginal: &[f64], bins: usize) -> Result<f64> {
    let n = bins as f64;
    let mu = mean(marginal);
    let spread = mu * (n - mu);
    if !(spread > 0.0) {
        return Err(Error::DegenerateMarginal { mean: mu, bins });
    }
    Ok(n * variance(marginal) / spread - 1.0)
}

/// Conditions `a` with `c(a) > 0`, with their weights.
fn supported_conditions(jcd: &JointClickDistribution) -> impl Iterator<Item = (usize, f64)> + '_ {
    (0..=jcd.bins_a()).filter_map(|a| {
        let w: f64 = jcd.row(a).iter().sum();
        (w > 0.0).then_some((a, w))
    })
}

fn variance_b(jcd: &JointClickDistribution) -> Result<f64> {
    let (_, mb) = marginals(jcd);
    let v = variance(&mb);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::NoVariability("B"))
    }
}

/// Conditional correlation coefficient
/// `κ = 1 - E_{c(a)}[Var_{c(b|a)}(b)] / Var_{c(b)}(b)`.
pub fn kappa(jcd: &JointClickDistribution) -> Result<f64> {
    let var_b = variance_b(jcd)?;
    let total: f64 = jcd.probs().iter().sum();
    let mut mean_conditional_variance = 0.0;
    for (a, w) in supported_conditions(jcd) {
        mean_conditional_variance += w / total * variance(&conditional(jcd, a)?);
    }
    Ok(1.0 - mean_conditional_variance / var_b)
}

/// Largest `κ` compatible with classical light: each conditional variance
/// is replaced by its binomial lower bound `E(b|a)(N_B - E(b|a)) / N_B`.
pub fn kappa_cl_max(jcd: &JointClickDistribution) -> Result<f64> {
    let var_b = variance_b(jcd)?;
    let n = jcd.bins_b() as f64;
    let total: f64 = jcd.probs().iter().sum();
    let mut bound = 0.0;
    for (a, w) in supported_conditions(jcd) {
        let mu = mean(&conditional(jcd, a)?);
        bound += w / total * mu * (n - mu);
    }
    Ok(1.0 - bound / (n * var_b))
}

/// Pearson's `γ = Cov(a, b) / √(Var(a) Var(b))`.
pub fn pearson(jcd: &JointClickDistribution) -> Result<f64> {
    let (ma, mb) = marginals(jcd);
    let (va, vb) = (variance(&ma), variance(&mb));
    if !(va > 0.0) {
        return Err(Error::NoVariability("A"));
    }
    if !(vb > 0.0) {
        return Err(Error::NoVariability("B"));
    }
    Ok(stats::covariance(jcd) / libm::sqrt(va * vb))
}

/// Classical bound on `|γ|` from the two binomial `Q` parameters:
/// `√| N_A N_B Q_A Q_B / ((N_A-1)(N_B-1)(Q_A+1)(Q_B+1)) |`.
pub fn pearson_cl_max(jcd: &JointClickDistribution) -> Result<f64> {
    let (ma, mb) = marginals(jcd);
    let (na, nb) = (jcd.bins_a() as f64, jcd.bins_b() as f64);
    let qa = binomial_q(&ma, jcd.bins_a())?;
    let qb = binomial_q(&mb, jcd.bins_b())?;
    if qa + 1.0 == 0.0 || qb + 1.0 == 0.0 {
        return Err(Error::DegenerateQ);
    }
    let ratio = na * nb * qa * qb / ((na - 1.0) * (nb - 1.0) * (qa + 1.0) * (qb + 1.0));
    Ok(libm::sqrt(ratio.abs()))
}

/// Conditional matrix of normally ordered moments
/// `M[m][m'] = ⟨:π̂_B^{m+m'}:⟩_{|a}`, `m, m' = 0..=⌊N_B/2⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub dim: usize,
    /// Row-major entries.
    pub entries: Vec<f64>,
    pub condition: usize,
}

impl MomentMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }
}

/// Dimension `⌊N_B/2⌋ + 1`, so that `m + m'` never exceeds `N_B`.
pub fn moment_matrix_dim(bins_b: usize) -> usize {
    bins_b / 2 + 1
}

pub fn moment_matrix(jcd: &JointClickDistribution, a: usize) -> Result<MomentMatrix> {
    let dim = moment_matrix_dim(jcd.bins_b());
    let moments = stats::conditional_normal_moments(jcd, a, 2 * (dim - 1))?;
    let mut entries = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            entries.push(moments.values[i + j]);
        }
    }
    Ok(MomentMatrix {
        dim,
        entries,
        condition: a,
    })
}

/// Minimal eigenvalue of `m` and the corresponding unit coefficient vector
/// `f`, which minimizes `⟨:f̂†f̂:⟩_{|a}` with `f̂ = Σ f_m π̂_B^m`.
pub fn min_eigenvalue(m: &MomentMatrix) -> Result<(f64, Vec<f64>)> {
    eigen::min_eigenpair(&m.entries, m.dim)
}

/// Minimal eigenvalue of one condition's moment matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionEigen {
    pub condition: usize,
    pub probability: f64,
    pub min_eigenvalue: f64,
    pub coefficients: Vec<f64>,
}

/// `𝔑` together with the per-condition minima it was taken over.
#[derive(Debug, Clone, PartialEq)]
pub struct HigherOrderNonclassicality {
    pub value: f64,
    pub conditions: Vec<ConditionEigen>,
    /// Any conditional moment outside `[0, 1]`.
    pub moments_out_of_range: bool,
}

pub fn conditional_nonclassicality(
    jcd: &JointClickDistribution,
) -> Result<HigherOrderNonclassicality> {
    let total: f64 = jcd.probs().iter().sum();
    let mut conditions = Vec::new();
    let mut out_of_range = false;
    for (a, w) in supported_conditions(jcd) {
        let m = moment_matrix(jcd, a)?;
        out_of_range |= m.entries.iter().any(|&x| !(0.0..=1.0).contains(&x));
        let (value, coefficients) = min_eigenvalue(&m)?;
        conditions.push(ConditionEigen {
            condition: a,
            probability: w / total,
            min_eigenvalue: value,
            coefficients,
        });
    }
    let value = conditions
        .iter()
        .map(|c| c.min_eigenvalue)
        .min_by(f64::total_cmp)
        .ok_or(Error::NoSupportedConditions)?;
    Ok(HigherOrderNonclassicality {
        value,
        conditions,
        moments_out_of_range: out_of_range,
    })
}

/// Higher-order conditional nonclassicality number
/// `𝔑 = min_a λ_min(M_a)`; negative values certify nonclassicality.
pub fn conditional_nonclassicality_number(jcd: &JointClickDistribution) -> Result<f64> {
    conditional_nonclassicality(jcd).map(|h| h.value)
}

/// Every scalar that ends up in a [`CriteriaReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    SummedClickMean,
    QA,
    QB,
    Kappa,
    KappaClMax,
    /// `κ - κ^cl.max`, positive when violated.
    KappaExcess,
    Gamma,
    GammaClMax,
    /// `|γ| - γ^cl.max`, positive when violated.
    GammaExcess,
    FrakN,
}

impl Statistic {
    pub const ALL: [Statistic; 10] = [
        Statistic::SummedClickMean,
        Statistic::QA,
        Statistic::QB,
        Statistic::Kappa,
        Statistic::KappaClMax,
        Statistic::KappaExcess,
        Statistic::Gamma,
        Statistic::GammaClMax,
        Statistic::GammaExcess,
        Statistic::FrakN,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::SummedClickMean => "summed_click_mean",
            Statistic::QA => "q_a",
            Statistic::QB => "q_b",
            Statistic::Kappa => "kappa",
            Statistic::KappaClMax => "kappa_cl_max",
            Statistic::KappaExcess => "kappa_excess",
            Statistic::Gamma => "gamma",
            Statistic::GammaClMax => "gamma_cl_max",
            Statistic::GammaExcess => "gamma_excess",
            Statistic::FrakN => "frak_n",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn evaluate(self, jcd: &JointClickDistribution) -> Result<f64> {
        match self {
            Statistic::SummedClickMean => Ok(stats::summed_click_mean(jcd)),
            Statistic::QA => binomial_q(&marginals(jcd).0, jcd.bins_a()),
            Statistic::QB => binomial_q(&marginals(jcd).1, jcd.bins_b()),
            Statistic::Kappa => kappa(jcd),
            Statistic::KappaClMax => kappa_cl_max(jcd),
            Statistic::KappaExcess => Ok(kappa(jcd)? - kappa_cl_max(jcd)?),
            Statistic::Gamma => pearson(jcd),
            Statistic::GammaClMax => pearson_cl_max(jcd),
            Statistic::GammaExcess => Ok(pearson(jcd)?.abs() - pearson_cl_max(jcd)?),
            Statistic::FrakN => conditional_nonclassicality_number(jcd),
        }
    }
}

/// A point value with its standard error.
///
/// `value` is `None` when the statistic is undefined on the data. `stderr` is
/// `None` when no bootstrap was run or when the statistic was undefined on
/// most replicates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    /// Fraction of bootstrap replicates on which the statistic was undefined.
    pub drop_fraction: f64,
}

impl Estimate {
    pub fn defined(&self) -> bool {
        self.value.is_some()
    }

    /// `stderr / |value|`.
    pub fn relative_error(&self) -> Option<f64> {
        match (self.value, self.stderr) {
            (Some(v), Some(s)) if v != 0.0 => Some(s / v.abs()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictState {
    Violated,
    NotViolated,
    /// A statistic or its error could not be computed.
    Undetermined,
}

/// Outcome of one classical-bound test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub state: VerdictState,
    /// Violation margin in units of its standard error; `None` without a
    /// positive standard error.
    pub significance_sigmas: Option<f64>,
}

impl Verdict {
    pub fn undetermined() -> Self {
        Verdict {
            state: VerdictState::Undetermined,
            significance_sigmas: None,
        }
    }

    pub fn violated(&self) -> Option<bool> {
        match self.state {
            VerdictState::Violated => Some(true),
            VerdictState::NotViolated => Some(false),
            VerdictState::Undetermined => None,
        }
    }

    /// `margin > 0` is the direction of a violation. With `stderr == 0`
    /// (exact data) any margin above [`NUMERICAL_FLOOR`] counts.
    pub fn from_margin(margin: Option<f64>, stderr: Option<f64>, threshold: f64) -> Self {
        let (Some(margin), Some(stderr)) = (margin, stderr) else {
            return Self::undetermined();
        };
        let violated = margin > NUMERICAL_FLOOR && margin > threshold * stderr;
        Verdict {
            state: if violated {
                VerdictState::Violated
            } else {
                VerdictState::NotViolated
            },
            significance_sigmas: (stderr > 0.0).then(|| margin / stderr),
        }
    }
}

/// Per-condition details behind `𝔑`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSummary {
    pub condition: usize,
    pub probability: f64,
    /// Shots with this outcome in arm A, when the input was a count matrix.
    pub shots: Option<u64>,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportMetadata {
    pub bins_a: usize,
    pub bins_b: usize,
    pub shots: Option<u64>,
    pub replicates: usize,
    pub seed: Option<u64>,
}

/// All statistics, bounds, errors and verdicts for one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct CriteriaReport {
    pub summed_click_mean: Estimate,
    pub q_a: Estimate,
    pub q_b: Estimate,
    pub kappa: Estimate,
    pub kappa_cl_max: Estimate,
    pub kappa_excess: Estimate,
    pub gamma: Estimate,
    pub gamma_cl_max: Estimate,
    pub gamma_excess: Estimate,
    pub frak_n: Estimate,
    /// `κ > κ^cl.max`.
    pub kappa_test: Verdict,
    /// `|γ| > γ^cl.max`.
    pub pearson_test: Verdict,
    /// `𝔑 < 0`.
    pub higher_order_test: Verdict,
    pub threshold: f64,
    pub conditions: Vec<ConditionSummary>,
    pub moments_out_of_range: bool,
    pub metadata: ReportMetadata,
}

impl CriteriaReport {
    pub fn estimate(&self, statistic: Statistic) -> &Estimate {
        match statistic {
            Statistic::SummedClickMean => &self.summed_click_mean,
            Statistic::QA => &self.q_a,
            Statistic::QB => &self.q_b,
            Statistic::Kappa => &self.kappa,
            Statistic::KappaClMax => &self.kappa_cl_max,
            Statistic::KappaExcess => &self.kappa_excess,
            Statistic::Gamma => &self.gamma,
            Statistic::GammaClMax => &self.gamma_cl_max,
            Statistic::GammaExcess => &self.gamma_excess,
            Statistic::FrakN => &self.frak_n,
        }
    }
}

/// Evaluates every criterion on `jcd`.
///
/// `errors` supplies bootstrap standard errors; without it the data are
/// treated as exact (zero error). A statistic that cannot be computed makes
/// its verdict undetermined rather than false.
pub fn evaluate_all(
    jcd: &JointClickDistribution,
    errors: Option<&BootstrapSummary>,
    threshold: f64,
) -> CriteriaReport {
    let estimate = |s: Statistic| {
        let value = s.evaluate(jcd).ok();
        match errors {
            None => Estimate {
                value,
                stderr: value.map(|_| 0.0),
                drop_fraction: 0.0,
            },
            Some(summary) => {
                let entry = summary.get(s);
                Estimate {
                    value,
                    stderr: entry.and_then(|e| e.stderr),
                    drop_fraction: entry.map_or(1.0, |e| e.drop_fraction),
                }
            }
        }
    };

    let summed_click_mean = estimate(Statistic::SummedClickMean);
    let q_a = estimate(Statistic::QA);
    let q_b = estimate(Statistic::QB);
    let kappa = estimate(Statistic::Kappa);
    let kappa_cl_max = estimate(Statistic::KappaClMax);
    let kappa_excess = estimate(Statistic::KappaExcess);
    let gamma = estimate(Statistic::Gamma);
    let gamma_cl_max = estimate(Statistic::GammaClMax);
    let gamma_excess = estimate(Statistic::GammaExcess);
    let frak_n = estimate(Statistic::FrakN);

    let kappa_test = Verdict::from_margin(kappa_excess.value, kappa_excess.stderr, threshold);
    let pearson_test = Verdict::from_margin(gamma_excess.value, gamma_excess.stderr, threshold);
    let higher_order_test =
        Verdict::from_margin(frak_n.value.map(|n| -n), frak_n.stderr, threshold);

    let (conditions, moments_out_of_range) = match conditional_nonclassicality(jcd) {
        Ok(h) => (
            h.conditions
                .into_iter()
                .map(|c| ConditionSummary {
                    condition: c.condition,
                    probability: c.probability,
                    shots: None,
                    min_eigenvalue: c.min_eigenvalue,
                })
                .collect(),
            h.moments_out_of_range,
        ),
        Err(_) => (Vec::new(), false),
    };

    CriteriaReport {
        summed_click_mean,
        q_a,
        q_b,
        kappa,
        kappa_cl_max,
        kappa_excess,
        gamma,
        gamma_cl_max,
        gamma_excess,
        frak_n,
        kappa_test,
        pearson_test,
        higher_order_test,
        threshold,
        conditions,
        moments_out_of_range,
        metadata: ReportMetadata {
            bins_a: jcd.bins_a(),
            bins_b: jcd.bins_b(),
            shots: errors.map(|e| e.shots),
            replicates: errors.map_or(0, |e| e.replicates),
            seed: errors.map(|e| e.seed),
        },
    }
}

/// [`evaluate_all`] on the relative frequencies of `counts`, with the shot
/// count of every condition recorded in the report.
pub fn evaluate_counts(
    counts: &CountMatrix,
    errors: Option<&BootstrapSummary>,
    threshold: f64,
) -> Result<CriteriaReport> {
    let jcd = normalize(counts)?;
    let mut report = evaluate_all(&jcd, errors, threshold);
    for c in &mut report.conditions {
        c.shots = Some(counts.row_total(c.condition));
    }
    report.metadata.shots = Some(counts.total());
    Ok(report)
}
