use nalgebra::{DMatrix, Vector3};

use super::*;
use crate::rng::substream;

fn rotate(g: &GroupElement, v: &Vector3<f64>) -> Vector3<f64> {
    let m = g.matrix();
    Vector3::new(
        m[(0, 0)] * v.x + m[(0, 1)] * v.y + m[(0, 2)] * v.z,
        m[(1, 0)] * v.x + m[(1, 1)] * v.y + m[(1, 2)] * v.z,
        m[(2, 0)] * v.x + m[(2, 1)] * v.y + m[(2, 2)] * v.z,
    )
}

fn wahba_config(sigma: f64, n_trials: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        group: "so3".into(),
        model: ModelConfig {
            kind: ModelKind::Wahba,
            directions: Some(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
            sigma: Some(sigma),
            covariance: None,
        },
        true_g: TrueGroupElement::Algebra(vec![0.2, -0.1, 0.3]),
        n_trials,
        n_obs: None,
        seed,
        tolerances: Tolerances::default(),
        estimator_bias: None,
    }
}

#[test]
fn wahba_estimator_recovers_noise_free_rotation() {
    let g = Group::so3().algebra_from(&[0.4, -0.8, 0.3]).unwrap().exp();
    let directions = vec![Vector3::x(), Vector3::y(), Vector3::z()];
    let observations: Vec<Vector3<f64>> = directions.iter().map(|d| rotate(&g, d)).collect();
    let estimate = wahba_ml_estimator(&observations, &directions).unwrap();
    assert!((estimate.matrix() - g.matrix()).norm() < 1e-12);
}

#[test]
fn wahba_estimator_identity_case() {
    let directions = vec![Vector3::x(), Vector3::y()];
    let estimate = wahba_ml_estimator(&directions, &directions).unwrap();
    assert!((estimate.matrix() - Group::so3().identity().matrix()).norm() < 1e-14);
}

#[test]
fn wahba_estimator_is_ml_optimal_per_trial() {
    let group = Group::so3();
    let true_g = group.algebra_from(&[0.3, 0.2, -0.4]).unwrap().exp();
    let directions = vec![Vector3::x(), Vector3::z()];
    let model = WahbaVectors::new(directions.clone(), 0.1).unwrap();
    let cost = |r: &GroupElement, xs: &[Vector3<f64>]| -> f64 {
        xs.iter()
            .zip(&directions)
            .map(|(x, d)| (x - rotate(r, d)).norm_squared())
            .sum()
    };
    let mut rng = substream(3, 0);
    for _ in 0..50 {
        let Observation::Vectors(xs) = model.sample(&true_g, &mut rng) else {
            unreachable!()
        };
        let estimate = wahba_ml_estimator(&xs, &directions).unwrap();
        assert!(cost(&estimate, &xs) <= cost(&true_g, &xs) + 1e-12);
    }
}

#[test]
fn wahba_estimator_rejects_degenerate_directions() {
    let d = Vector3::z();
    assert!(matches!(
        wahba_ml_estimator(&[d], &[d]),
        Err(Error::DegenerateProblem { .. })
    ));
    assert!(matches!(
        wahba_ml_estimator(&[d, d], &[d, -d]),
        Err(Error::DegenerateProblem { .. })
    ));
    assert!(matches!(
        wahba_ml_estimator(&[d], &[d, Vector3::x()]),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn error_covariance_of_exact_estimates_is_zero() {
    let g = Group::so3().algebra_from(&[0.1, 0.5, -0.2]).unwrap().exp();
    let estimates = vec![g.clone(); 8];
    let p = empirical_error_covariance(&g, &estimates).unwrap();
    assert_eq!(p.matrix(), &DMatrix::zeros(3, 3));
}

#[test]
fn error_covariance_matches_perturbation_second_moment() {
    // ĝ = exp(w)·g gives error log(g ĝ⁻¹) = -w, so P̂ is the second moment
    // of the perturbations.
    let group = Group::so3();
    let g = group.algebra_from(&[0.3, 0.0, -0.1]).unwrap().exp();
    let ws = [
        [0.05, -0.02, 0.01],
        [-0.03, 0.04, 0.02],
        [0.01, 0.01, -0.05],
    ];
    let estimates: Vec<GroupElement> = ws
        .iter()
        .map(|w| group.algebra_from(w).unwrap().exp().compose(&g).unwrap())
        .collect();
    let p = empirical_error_covariance(&g, &estimates).unwrap();
    let mut expected = DMatrix::zeros(3, 3);
    for w in &ws {
        let v = nalgebra::DVector::from_row_slice(w);
        expected += &v * v.transpose();
    }
    expected /= ws.len() as f64;
    assert!((p.matrix() - expected).norm() < 1e-12);
}

#[test]
fn error_beyond_branch_cut_names_the_trial() {
    let group = Group::so3();
    let g = group.identity();
    let near_pi = group
        .algebra_from(&[std::f64::consts::PI - 1e-9, 0.0, 0.0])
        .unwrap()
        .exp();
    let estimates = vec![g.clone(), near_pi, g.clone()];
    match empirical_error_covariance(&g, &estimates) {
        Err(Error::Trial { index, source }) => {
            assert_eq!(index, 1);
            assert!(matches!(*source, Error::LogBranchCut { .. }));
        }
        other => panic!("expected trial error, got {other:?}"),
    }
}

#[test]
fn bias_of_symmetric_perturbations_vanishes() {
    let group = Group::so3();
    let g = group.algebra_from(&[0.2, 0.1, 0.0]).unwrap().exp();
    let w = group.algebra_from(&[0.2, -0.1, 0.15]).unwrap();
    let estimates = vec![
        w.exp().compose(&g).unwrap(),
        w.scaled(-1.0).exp().compose(&g).unwrap(),
    ];
    let b = bias_vector(&g, &estimates).unwrap();
    assert!(b.norm() < 1e-15);

    let exact = vec![g.clone(); 4];
    assert_eq!(bias_vector(&g, &exact).unwrap().norm(), 0.0);
}

#[test]
fn abelian_gaussian_experiment_reproduces_euclidean_crb() {
    let config = ExperimentConfig {
        group: "abelian3".into(),
        model: ModelConfig {
            kind: ModelKind::ConcentratedGaussian,
            directions: None,
            sigma: None,
            covariance: Some(CovarianceSpec::Diagonal(vec![0.04, 0.09, 0.01])),
        },
        true_g: TrueGroupElement::Algebra(vec![1.0, -2.0, 0.5]),
        n_trials: 4000,
        n_obs: Some(4),
        seed: 42,
        tolerances: Tolerances::default(),
        estimator_bias: None,
    };
    let report = run_experiment(&config).unwrap();
    assert_eq!(report.information_source, "analytic");
    // All bound forms collapse to J⁻¹, bitwise.
    assert_eq!(
        report.bound_second_order.as_ref().unwrap(),
        &report.bound_first_order
    );
    assert_eq!(
        report.bound_second_order_at_p_hat.as_ref().unwrap(),
        &report.bound_first_order
    );
    assert_eq!(
        report.smith_form.as_ref().unwrap(),
        &report.bound_first_order
    );
    assert_eq!(report.fixed_point_iterations, Some(1));
    // J = n_obs·Σ⁻¹, so J⁻¹ = Σ/n_obs.
    assert!((report.bound_first_order[0][0] - 0.01).abs() < 1e-15);
    assert!(report.bias_ok);
    assert!(report.dominance_second.as_ref().unwrap().holds);
    assert!((report.efficiency_ratio - 1.0).abs() < 0.05);
}

#[test]
fn wahba_experiment_dominates_second_order_bound() {
    let report = run_experiment(&wahba_config(0.1, 4000, 42)).unwrap();
    assert_eq!(report.information_source, "analytic");
    assert!(report.bias_ok, "bias {} > {}", 0.0, report.bias_threshold);
    let d2 = report.dominance_second.as_ref().unwrap();
    assert!(d2.applicable);
    assert!(
        d2.holds,
        "min eigenvalue {} below -{}",
        d2.min_eigenvalue, d2.stat_tolerance
    );
    assert!(
        report.efficiency_ratio > 0.95 && report.efficiency_ratio < 1.15,
        "efficiency {}",
        report.efficiency_ratio
    );
}

#[test]
fn reports_are_bitwise_reproducible() {
    let a = run_experiment(&wahba_config(0.05, 500, 7)).unwrap();
    let b = run_experiment(&wahba_config(0.05, 500, 7)).unwrap();
    assert_eq!(a, b);
    assert_eq!(render_json(&a), render_json(&b));
    assert_eq!(render_csv(&a), render_csv(&b));

    let c = run_experiment(&wahba_config(0.05, 500, 8)).unwrap();
    assert_ne!(a.p_hat, c.p_hat);
}

#[test]
fn equivariance_bounds_conjugate_between_base_points() {
    // J(g) = R J(Id) Rᵀ for the Wahba model, and the whole bound pipeline is
    // conjugation-equivariant, so bounds at two base points agree after
    // moving to a common frame.
    let mut cfg1 = wahba_config(0.1, 1, 42);
    cfg1.true_g = TrueGroupElement::Algebra(vec![0.3, -0.5, 0.2]);
    let mut cfg2 = cfg1.clone();
    cfg2.true_g = TrueGroupElement::Algebra(vec![-0.7, 0.1, 0.4]);
    let r1 = run_experiment(&cfg1).unwrap();
    let r2 = run_experiment(&cfg2).unwrap();

    let group = Group::so3();
    let g1 = group.algebra_from(&[0.3, -0.5, 0.2]).unwrap().exp();
    let g2 = group.algebra_from(&[-0.7, 0.1, 0.4]).unwrap().exp();
    let rel = g2.compose(&g1.inverse()).unwrap().matrix().clone();
    let to_matrix = |rows: &MatrixData| DMatrix::from_fn(3, 3, |i, j| rows[i][j]);
    let b1 = to_matrix(r1.bound_second_order.as_ref().unwrap());
    let b2 = to_matrix(r2.bound_second_order.as_ref().unwrap());
    let conjugated = &rel * b1 * rel.transpose();
    assert!((b2 - conjugated).norm() < 1e-9);
}

#[test]
fn degenerate_single_direction_runs_in_observable_subspace() {
    let config = ExperimentConfig {
        group: "so3".into(),
        model: ModelConfig {
            kind: ModelKind::Wahba,
            directions: Some(vec![[0.0, 0.0, 1.0]]),
            sigma: Some(0.05),
            covariance: None,
        },
        true_g: TrueGroupElement::Named(TrueGroupName::Identity),
        n_trials: 2000,
        n_obs: None,
        seed: 42,
        tolerances: Tolerances::default(),
        estimator_bias: None,
    };
    let report = run_experiment(&config).unwrap();
    assert!(report.bound_second_order.is_none());
    assert!(report.dominance_second.is_none());
    assert!(report
        .warnings
        .iter()
        .any(|w| w.contains("singular-information")));
    assert!(report
        .warnings
        .iter()
        .any(|w| w.contains("degenerate-wahba")));
    // The lifted first-order bound vanishes along the unobservable axis.
    assert!(report.bound_first_order[2][2].abs() < 1e-15);
    assert!(report.dominance_first.holds);
    assert!(report.bias_ok);
    assert!((report.efficiency_ratio - 1.0).abs() < 0.1);
}

#[test]
fn biased_estimator_trips_the_gate_and_marks_dominance_not_applicable() {
    let mut config = wahba_config(0.05, 1500, 42);
    config.estimator_bias = Some(vec![0.05, 0.0, 0.0]);
    let report = run_experiment(&config).unwrap();
    assert!(!report.bias_ok);
    assert!(!report.dominance_second.as_ref().unwrap().applicable);
    assert!(report
        .warnings
        .iter()
        .any(|w| w.contains("unbiasedness gate failed")));
}

#[test]
fn efficiency_improves_toward_one_as_observations_double() {
    // ML asymptotic efficiency: tr(P̂)/tr(J⁻¹) approaches 1 from above as the
    // per-trial observation count grows.
    let mut ratios = Vec::new();
    for n_obs in [3usize, 6, 12, 24] {
        let mut config = wahba_config(0.15, 2000, 42);
        config.n_obs = Some(n_obs);
        let report = run_experiment(&config).unwrap();
        ratios.push(report.efficiency_ratio);
    }
    let spread = |r: f64| (r - 1.0).abs();
    assert!(
        spread(ratios[3]) <= spread(ratios[0]) + 0.02,
        "ratios {ratios:?}"
    );
    for r in &ratios {
        assert!(*r > 0.9 && *r < 1.2, "ratios {ratios:?}");
    }
}

#[test]
fn config_round_trips_through_serde() {
    let config = wahba_config(0.1, 100, 9);
    let json = serde_json::to_string(&config).unwrap();
    let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
    assert_eq!(config, back);
}

#[test]
fn report_round_trips_through_serde() {
    let report = run_experiment(&wahba_config(0.1, 50, 5)).unwrap();
    let json = render_json(&report);
    let back: ExperimentReport = serde_json::from_str(&json).unwrap();
    assert_eq!(report, back);
}
