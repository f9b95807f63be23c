//! Statistical checks of the samplers and the bootstrap against exact
//! distributions.

use clickstat::simulator::{
    build_photon_distribution, joint_click_distribution, sample_counts, sample_counts_physical,
};
use clickstat::stats::{self, marginals};
use clickstat::uncertainty::{bootstrap, BootstrapConfig};
use clickstat::{model, CountMatrix, DetectorConfig, JointClickDistribution, StateSpec, Statistic};

fn exact(
    spec: &StateSpec,
    bins: usize,
    eta: f64,
    nu: f64,
) -> (JointClickDistribution, DetectorConfig) {
    let det = DetectorConfig::new(bins, eta, nu).unwrap();
    let jpd = build_photon_distribution(spec).unwrap();
    (joint_click_distribution(&jpd, &det, &det).unwrap(), det)
}

/// Pearson χ² over cells with expectation ≥ 5; the sparse remainder is
/// pooled into one cell. Returns (statistic, degrees of freedom).
fn chi_square(counts: &CountMatrix, jcd: &JointClickDistribution) -> (f64, usize) {
    let m = counts.total() as f64;
    let (mut chi, mut cells) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&c, &p) in counts.counts().iter().zip(jcd.probs()) {
        let e = p * m;
        if e >= 5.0 {
            chi += (c as f64 - e).powi(2) / e;
            cells += 1;
        } else {
            pooled_obs += c as f64;
            pooled_exp += e;
        }
    }
    if pooled_exp >= 5.0 {
        chi += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    (chi, cells - 1)
}

/// Upper 0.1% point of χ²(k), Wilson–Hilferty.
fn chi_square_critical(k: usize) -> f64 {
    let k = k as f64;
    let z = 3.090_232;
    let h = 2.0 / (9.0 * k);
    k * (1.0 - h + z * h.sqrt()).powi(3)
}

#[test]
fn physical_sampler_matches_exact_distribution() {
    let cases = [
        (StateSpec::tmsv_from_lambda2(0.3), 8, 0.6, 1e-3),
        (StateSpec::split_photon_from_t2(0.4), 4, 0.8, 0.02),
        (
            StateSpec::Coherent {
                mean_a: 2.0,
                mean_b: 0.5,
            },
            6,
            0.7,
            0.01,
        ),
    ];
    for (i, (spec, bins, eta, nu)) in cases.into_iter().enumerate() {
        let (jcd, det) = exact(&spec, bins, eta, nu);
        let jpd = build_photon_distribution(&spec).unwrap();
        let counts = sample_counts_physical(&jpd, &det, &det, 400_000, 11 + i as u64).unwrap();
        let (chi, dof) = chi_square(&counts, &jcd);
        let critical = chi_square_critical(dof);
        assert!(
            chi < critical,
            "case {i}: χ² = {chi:.1} ≥ {critical:.1} (dof {dof})"
        );
    }
}

#[test]
fn multinomial_sampler_passes_chi_square() {
    let (jcd, _) = exact(&StateSpec::tmsv_from_lambda2(0.1), 8, 0.5, 1e-4);
    for seed in 0..5 {
        let counts = sample_counts(&jcd, 1_000_000, seed).unwrap();
        assert_eq!(counts.total(), 1_000_000);
        let (chi, dof) = chi_square(&counts, &jcd);
        assert!(chi < chi_square_critical(dof), "seed {seed}: χ² = {chi}");
    }
}

fn l1(counts: &CountMatrix, jcd: &JointClickDistribution) -> f64 {
    let m = counts.total() as f64;
    counts
        .counts()
        .iter()
        .zip(jcd.probs())
        .map(|(&c, &p)| (c as f64 / m - p).abs())
        .sum()
}

#[test]
fn empirical_distribution_converges_at_inverse_root_rate() {
    let (jcd, _) = exact(&StateSpec::tmsv_from_lambda2(0.1), 8, 0.5, 1e-4);
    let mean_l1 = |shots: u64| -> f64 {
        (0..20)
            .map(|s| l1(&sample_counts(&jcd, shots, 1000 + s).unwrap(), &jcd))
            .sum::<f64>()
            / 20.0
    };
    let coarse = mean_l1(10_000);
    let fine = mean_l1(1_000_000);
    // 100× the shots gives 10× smaller deviations
    let ratio = coarse / fine;
    assert!((7.0..14.0).contains(&ratio), "L1 ratio {ratio}");
}

#[test]
fn bootstrap_error_of_linear_statistic_matches_closed_form() {
    let (jcd, _) = exact(&StateSpec::split_photon_from_t2(0.5), 8, 0.45, 1e-4);
    let counts = sample_counts(&jcd, 100_000, 5).unwrap();
    let empirical = model::normalize(&counts).unwrap();
    // σ(E(a+b)) = √(Var(a+b) / M)
    let (ma, mb) = marginals(&empirical);
    let var = stats::variance(&ma) + stats::variance(&mb) + 2.0 * stats::covariance(&empirical);
    let closed = (var / counts.total() as f64).sqrt();
    let summary = bootstrap(&counts, &BootstrapConfig::new(1000, 3)).unwrap();
    let boot = summary.stderr(Statistic::SummedClickMean).unwrap();
    assert!(
        (boot / closed - 1.0).abs() < 0.2,
        "bootstrap {boot} vs closed form {closed}"
    );
}

#[test]
fn bootstrap_error_shrinks_with_shots() {
    let (jcd, _) = exact(&StateSpec::tmsv_from_lambda2(0.1), 8, 0.5, 1e-4);
    let sigma = |shots: u64| {
        let counts = sample_counts(&jcd, shots, 21).unwrap();
        bootstrap(&counts, &BootstrapConfig::new(400, 8))
            .unwrap()
            .stderr(Statistic::KappaExcess)
            .unwrap()
    };
    let ratio = sigma(10_000) / sigma(1_000_000);
    assert!((7.0..13.0).contains(&ratio), "σ ratio {ratio}");
}
