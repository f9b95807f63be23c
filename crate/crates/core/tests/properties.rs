//! Randomized invariants of the statistics, criteria and eigen-solver.

use approx::assert_relative_eq;
use proptest::prelude::*;

use clickstat::criteria::{
    conditional_nonclassicality_number, kappa, kappa_cl_max, moment_matrix, pearson, pearson_cl_max,
};
use clickstat::eigen::{min_eigenpair, residual, symmetric_eigen};
use clickstat::simulator::{build_photon_distribution, joint_click_distribution};
use clickstat::stats::{self, conditional, marginals, mean, variance};
use clickstat::{DetectorConfig, JointClickDistribution, StateSpec};

fn random_jcd() -> impl Strategy<Value = JointClickDistribution> {
    (2usize..=8, 2usize..=8).prop_flat_map(|(na, nb)| {
        // Roughly a third of the cells are empty, so empty conditions occur.
        prop::collection::vec(
            prop_oneof![Just(0.0), 1e-6f64..1.0, 1e-6f64..1.0],
            (na + 1) * (nb + 1),
        )
        .prop_filter("needs mass", |w| w.iter().sum::<f64>() > 0.0)
        .prop_map(move |w| JointClickDistribution::from_weights(na, nb, w).unwrap())
    })
}

fn detector() -> impl Strategy<Value = DetectorConfig> {
    (2usize..=12, 0.01f64..=1.0, 0.0f64..0.05)
        .prop_map(|(n, eta, nu)| DetectorConfig::new(n, eta, nu).unwrap())
}

fn physical_state() -> impl Strategy<Value = StateSpec> {
    prop_oneof![
        (0.0f64..3.0, 0.0f64..3.0).prop_map(|(a, b)| StateSpec::Coherent {
            mean_a: a,
            mean_b: b
        }),
        (0.01f64..0.8).prop_map(StateSpec::tmsv_from_lambda2),
        (0.01f64..0.99).prop_map(StateSpec::split_photon_from_t2),
    ]
}

fn simulated() -> impl Strategy<Value = JointClickDistribution> {
    (physical_state(), detector(), detector()).prop_map(|(s, da, db)| {
        let jpd = build_photon_distribution(&s).unwrap();
        joint_click_distribution(&jpd, &da, &db).unwrap()
    })
}

fn symmetric_of(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n * n).prop_map(move |mut m| {
        for i in 0..n {
            for j in 0..i {
                m[i * n + j] = m[j * n + i];
            }
        }
        m
    })
}

fn symmetric(max_dim: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1usize..=max_dim).prop_flat_map(|n| symmetric_of(n).prop_map(move |m| (n, m)))
}

/// Classical click statistics: a convex mixture of coherent products seen by
/// arbitrary lossy, noisy detectors.
fn classical_mixture() -> impl Strategy<Value = JointClickDistribution> {
    (
        2usize..=10,
        2usize..=10,
        0.01f64..=1.0,
        0.01f64..=1.0,
        0.0f64..0.05,
    )
        .prop_flat_map(|(na, nb, eta_a, eta_b, nu)| {
            prop::collection::vec((0.0f64..4.0, 0.0f64..4.0, 0.01f64..1.0), 1..=4).prop_map(
                move |parts| {
                    let da = DetectorConfig::new(na, eta_a, nu).unwrap();
                    let db = DetectorConfig::new(nb, eta_b, nu).unwrap();
                    let mut mix = vec![0.0; (na + 1) * (nb + 1)];
                    for (ma, mb, w) in parts {
                        let jpd = build_photon_distribution(&StateSpec::Coherent {
                            mean_a: ma,
                            mean_b: mb,
                        })
                        .unwrap();
                        let jcd = joint_click_distribution(&jpd, &da, &db).unwrap();
                        for (m, p) in mix.iter_mut().zip(jcd.probs()) {
                            *m += w * p;
                        }
                    }
                    JointClickDistribution::from_weights(na, nb, mix).unwrap()
                },
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn kappa_in_unit_interval(jcd in prop_oneof![random_jcd(), simulated()]) {
        if let Ok(k) = kappa(&jcd) {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&k), "κ = {k}");
        }
    }

    #[test]
    fn pearson_bounded(jcd in prop_oneof![random_jcd(), simulated()]) {
        if let Ok(g) = pearson(&jcd) {
            prop_assert!(g.abs() <= 1.0 + 1e-12, "γ = {g}");
        }
    }

    #[test]
    fn simulated_distributions_are_normalized(jcd in simulated()) {
        let sum: f64 = jcd.probs().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12, "Σc = {sum}");
        prop_assert!(jcd.probs().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn eigen_residual_small((n, m) in symmetric(7)) {
        let e = symmetric_eigen(&m, n).unwrap();
        for j in 0..n {
            let r = residual(&m, n, e.values[j], &e.vector(j));
            prop_assert!(r <= 1e-10, "residual {r} for eigenvalue {}", e.values[j]);
        }
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn moment_matrix_residual_small(jcd in prop_oneof![random_jcd(), simulated()]) {
        for a in 0..=jcd.bins_a() {
            let Ok(m) = moment_matrix(&jcd, a) else { continue };
            let (value, vector) = min_eigenpair(&m.entries, m.dim).unwrap();
            prop_assert!(residual(&m.entries, m.dim, value, &vector) <= 1e-10);
        }
    }

    #[test]
    fn classical_mixtures_respect_every_bound(jcd in classical_mixture()) {
        let n = conditional_nonclassicality_number(&jcd).unwrap();
        prop_assert!(n >= -1e-10, "𝔑 = {n}");
        if let (Ok(k), Ok(kc)) = (kappa(&jcd), kappa_cl_max(&jcd)) {
            // κ - κ^cl.max carries a 1/Var(b) factor; check the numerator
            let var_b = variance(&marginals(&jcd).1);
            prop_assert!((k - kc) * var_b <= 1e-10, "κ = {k} > {kc}");
        }
        if let (Ok(g), Ok(gc)) = (pearson(&jcd), pearson_cl_max(&jcd)) {
            // Compared squared: (γ^cl.max)² is linear in Q_A Q_B, so the
            // truncation error of the Poisson inputs stays small even when a
            // marginal is nearly binomial and the square root would amplify it.
            // Two-component mixtures sit exactly on the bound.
            prop_assert!(g * g <= gc * gc + 1e-10, "|γ| = {} > {gc}", g.abs());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn two_by_two_matches_closed_form(a in -5.0f64..5.0, b in -5.0f64..5.0, d in -5.0f64..5.0) {
        let e = symmetric_eigen(&[a, b, b, d], 2).unwrap();
        let mid = (a + d) / 2.0;
        let r = (((a - d) / 2.0).powi(2) + b * b).sqrt();
        prop_assert!((e.values[0] - (mid - r)).abs() < 1e-12);
        prop_assert!((e.values[1] - (mid + r)).abs() < 1e-12);
    }

    #[test]
    fn three_by_three_matches_characteristic_polynomial(m in symmetric_of(3)) {
        let e = symmetric_eigen(&m, 3).unwrap();
        let at = |i: usize, j: usize| m[i * 3 + j];
        let trace = at(0, 0) + at(1, 1) + at(2, 2);
        let minors = at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0) + at(0, 0) * at(2, 2) - at(0, 2) * at(2, 0)
            + at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1);
        let det = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1))
            - at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0))
            + at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
        let [l0, l1, l2] = [e.values[0], e.values[1], e.values[2]];
        prop_assert!((l0 + l1 + l2 - trace).abs() < 1e-9);
        prop_assert!((l0 * l1 + l0 * l2 + l1 * l2 - minors).abs() < 1e-8);
        prop_assert!((l0 * l1 * l2 - det).abs() < 1e-7);
        // each eigenvalue is a root of det(A - λI)
        for l in [l0, l1, l2] {
            let p = -l * l * l + trace * l * l - minors * l + det;
            prop_assert!(p.abs() < 1e-7 * (1.0 + l.abs().powi(3)), "p({l}) = {p}");
        }
    }

    #[test]
    fn law_of_total_variance(jcd in random_jcd()) {
        let (ma, mb) = marginals(&jcd);
        let mut within = 0.0;
        let mut means = Vec::new();
        for (a, &w) in ma.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let c = conditional(&jcd, a).unwrap();
            within += w * variance(&c);
            means.push((w, mean(&c)));
        }
        let grand: f64 = means.iter().map(|(w, m)| w * m).sum();
        let between: f64 = means.iter().map(|(w, m)| w * (m - grand).powi(2)).sum();
        assert_relative_eq!(variance(&mb), within + between, max_relative = 1e-10, epsilon = 1e-14);
    }

    #[test]
    fn normally_ordered_identities(jcd in random_jcd()) {
        let (ma, _) = marginals(&jcd);
        let n = jcd.bins_a();
        let m1 = stats::normal_moment(&ma, 1, n).unwrap();
        let m2 = stats::normal_moment(&ma, 2, n).unwrap();
        // ⟨:(Δπ̂)²:⟩ = ⟨:π̂²:⟩ - ⟨π̂⟩²
        assert_relative_eq!(stats::normally_ordered_variance(&ma, n), m2 - m1 * m1, epsilon = 1e-13);
        assert_relative_eq!(m1, mean(&ma) / n as f64, epsilon = 1e-14);
        // Cov(a, b) = N_A N_B (⟨:π̂_A π̂_B:⟩ - ⟨π̂_A⟩⟨π̂_B⟩)
        let (_, mb) = marginals(&jcd);
        let nb = jcd.bins_b() as f64;
        let cov = n as f64 * nb * (stats::joint_normal_moment(&jcd) - m1 * mean(&mb) / nb);
        assert_relative_eq!(stats::covariance(&jcd), cov, epsilon = 1e-12);
    }

    #[test]
    fn arm_exchange_symmetry(jcd in prop_oneof![random_jcd(), simulated()]) {
        let s = jcd.swapped();
        prop_assert_eq!(s.swapped(), jcd.clone());
        assert_relative_eq!(stats::summed_click_mean(&s), stats::summed_click_mean(&jcd), epsilon = 1e-13);
        assert_relative_eq!(stats::covariance(&s), stats::covariance(&jcd), epsilon = 1e-13);
        if let (Ok(g), Ok(gs)) = (pearson(&jcd), pearson(&s)) {
            assert_relative_eq!(g, gs, epsilon = 1e-12);
        }
        if let (Ok(c), Ok(cs)) = (pearson_cl_max(&jcd), pearson_cl_max(&s)) {
            assert_relative_eq!(c, cs, epsilon = 1e-12, max_relative = 1e-10);
        }
    }

    #[test]
    fn scale_invariance(jcd in random_jcd(), scale in 1e-3f64..1e3) {
        let scaled = JointClickDistribution::from_weights(
            jcd.bins_a(),
            jcd.bins_b(),
            jcd.probs().iter().map(|p| p * scale).collect(),
        ).unwrap();
        if let (Ok(k), Ok(ks)) = (kappa(&jcd), kappa(&scaled)) {
            assert_relative_eq!(k, ks, epsilon = 1e-10);
        }
        let (n, ns) = (conditional_nonclassicality_number(&jcd).unwrap(), conditional_nonclassicality_number(&scaled).unwrap());
        assert_relative_eq!(n, ns, epsilon = 1e-10);
    }
}
