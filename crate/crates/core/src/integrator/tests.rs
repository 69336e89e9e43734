use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::library::{make_host_vector, make_logistic, make_si, HostVectorParameters};
use crate::linalg::dot;
use crate::model::Domain;

fn scalar_system(phi: fn(f64, f64) -> f64) -> GeneralSplitSystem {
    GeneralSplitSystem::new(
        1,
        Arc::new(move |y: &[f64], z: &[f64]| vec![phi(y[0], z[0])]),
        Domain::unconstrained(1),
    )
    .unwrap()
}

#[test]
fn logistic_forward_hand_value() {
    let m = make_logistic(1.0, 1.0).unwrap();
    let y = step_forward(&m, &[0.5], 0.1).unwrap();
    assert!((y[0] - 0.525).abs() < 1e-15);
    let y = step_forward(&m, &[1.0], 0.1).unwrap();
    assert!((y[0] - 1.0).abs() < 1e-15);
    let y = step_forward(&m, &[0.0], 0.1).unwrap();
    assert_eq!(y[0], 0.0);
}

#[test]
fn si_total_is_conserved() {
    let m = make_si(1.0, 1.0).unwrap();
    let x = [0.9, 0.1];
    for h in [0.05, 0.5, 0.99] {
        let y = step_forward(&m, &x, h).unwrap();
        assert!((y[0] + y[1] - 1.0).abs() <= 1e-15, "h = {h}");
        assert!(y[0] > 0.0 && y[1] > 0.0);
    }
}

#[test]
fn backward_inverts_forward() {
    let m = make_logistic(1.0, 1.0).unwrap();
    let y = step_forward(&m, &[0.3], 0.5).unwrap();
    let x = step_backward(&m, &y, 0.5).unwrap();
    assert!((x[0] - 0.3).abs() < 1e-15);
    assert!(reversibility_residual(&m, &[0.3], 0.5).unwrap() <= 1e-14);
}

#[test]
fn host_vector_backward_plane_identity() {
    let p = HostVectorParameters::default();
    let m = make_host_vector(&p).unwrap();
    let (u, w) = HostVectorParameters::population_normals();
    let x = [6.0, 2.0, 5.0, 1.5, 2.0];
    let h = 0.4;
    let y = step_backward(&m, &x, h).unwrap();
    let f = m.eval_f(&x).unwrap();
    let delta: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
    let lhs = dot(&u, &delta);
    let rhs = -h * dot(&u, &f) / (1.0 - 0.5 * h * p.mu_v);
    assert!((lhs - rhs).abs() < 1e-13, "{lhs} vs {rhs}");
    // host total: w^T(P+Q) = 0 and w^T L = -mu w^T
    let lhs = dot(&w, &delta);
    let rhs = -h * dot(&w, &f) / (1.0 - 0.5 * h * p.mu);
    assert!((lhs - rhs).abs() < 1e-13, "{lhs} vs {rhs}");
}

#[test]
fn forward_rejects_bad_input() {
    let m = make_logistic(1.0, 1.0).unwrap();
    assert!(matches!(
        step_forward(&m, &[0.5], 0.0),
        Err(NsfdError::InvalidStep { .. })
    ));
    assert!(matches!(
        step_forward(&m, &[0.5], f64::NAN),
        Err(NsfdError::InvalidStep { .. })
    ));
    assert!(matches!(
        step_forward(&m, &[0.5, 0.1], 0.1),
        Err(NsfdError::DimensionMismatch { .. })
    ));
    // far outside the domain the solve matrix loses dominance
    let si = make_si(1.0, 1.0).unwrap();
    assert!(matches!(
        step_forward(&si, &[5.0, 5.0], 1.0),
        Err(NsfdError::NotDominant { column: 1, .. })
    ));
}

#[test]
fn general_bilinear_phi() {
    let sys = scalar_system(|y, z| -y * z);
    let y = step_implicit_general(&sys, &[1.0], 1.0, &NewtonOptions::default()).unwrap();
    assert!((y[0] - 0.5).abs() < 1e-12);
}

#[test]
fn general_quadratic_phi() {
    let sys = scalar_system(|y, z| -0.5 * (y * y + z * z));
    let y = step_implicit_general(&sys, &[1.0], 1.0, &NewtonOptions::default()).unwrap();
    assert!((y[0] - (2f64.sqrt() - 1.0)).abs() < 1e-12);
}

#[test]
fn general_zero_phi_is_identity() {
    let sys = scalar_system(|_, _| 0.0);
    let y = step_implicit_general(&sys, &[0.7], 0.3, &NewtonOptions::default()).unwrap();
    assert_eq!(y, vec![0.7]);
}

#[test]
fn general_matches_linear_solve() {
    let p = HostVectorParameters::default();
    let m = make_host_vector(&p).unwrap();
    let x = [6.0, 2.0, 5.0, 1.5, 2.0];
    let direct = step_forward(&m, &x, 0.5).unwrap();
    for analytic in [true, false] {
        let sys = GeneralSplitSystem::from_mass_action(&m, analytic);
        let y = step_implicit_general(&sys, &x, 0.5, &NewtonOptions::default()).unwrap();
        assert!(max_abs_diff(&y, &direct) < 1e-11, "analytic = {analytic}");
    }
}

#[test]
fn bound_hand_values() {
    let logistic = step_bound(&make_logistic(1.0, 1.0).unwrap());
    assert!((logistic.h_bar - 2.0).abs() < 1e-15);
    assert!(!logistic.capped && logistic.certified);

    let si = step_bound(&make_si(2.0, 3.0).unwrap());
    assert!((si.h_bar - 1.0 / 6.0).abs() < 1e-15);

    let hv = step_bound(&make_host_vector(&HostVectorParameters::default()).unwrap());
    assert!((hv.h_bar - 1.0 / 0.75).abs() < 1e-12);
    assert_eq!(hv.limiting_column, 3);
    let expected = [0.6, 0.4, 0.35, 0.75, 0.1];
    for (c, e) in hv.per_column.iter().zip(expected) {
        assert!((c.bound - e).abs() < 1e-12, "{c:?}");
    }
}

#[test]
fn bound_caps_trivial_model() {
    let m = MassActionModel::new(
        "zero",
        vec!["x".into(), "y".into()],
        vec![],
        RealMatrix::zeros(2, 2),
        vec![0.0, 0.0],
        Domain::orthant(2),
    )
    .unwrap();
    let b = step_bound(&m);
    assert_eq!(b.h_bar, DEFAULT_H_MAX);
    assert!(b.capped);
}

#[test]
fn integrate_zero_steps() {
    let m = make_logistic(1.0, 1.0).unwrap();
    let t = integrate(&m, &[0.2], 0.1, 0).unwrap();
    assert_eq!(t.states, vec![vec![0.2]]);
}

#[test]
fn integrate_logistic_accuracy() {
    let m = make_logistic(1.0, 1.0).unwrap();
    let t = integrate(&m, &[0.5], 0.1, 10).unwrap();
    assert_eq!(t.len(), 11);
    assert!((t.time(10) - 1.0).abs() < 1e-15);
    assert!((t.final_state()[0] - 0.731_058_578_630_004_9).abs() < 2e-4);
}

#[test]
fn integrate_reports_failing_step() {
    let m = make_si(1.0, 1.0).unwrap();
    let err = integrate(&m, &[5.0, 5.0], 1.0, 3).unwrap_err();
    assert!(matches!(err, NsfdError::StepFailed { step: 0, .. }));
}

#[test]
fn schemes_parse_and_run() {
    let m = make_logistic(1.0, 1.0).unwrap();
    for s in Scheme::ALL {
        assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        let t = integrate_with(&m, s, &[0.5], 0.1, 10).unwrap();
        assert!((t.final_state()[0] - 0.731_058_578_630_004_9).abs() < 2e-2);
    }
    assert!("midpoint".parse::<Scheme>().is_err());
}

proptest! {
    #[test]
    fn logistic_reversible(x in 0.0f64..=1.0, h in 0.001f64..1.999) {
        let m = make_logistic(1.0, 1.0).unwrap();
        prop_assert!(relative_reversibility_residual(&m, &[x], h).unwrap() <= 1e-11);
    }

    #[test]
    fn logistic_stays_in_interval(x in 0.0f64..=1.0, h in 0.001f64..1.999) {
        let m = make_logistic(1.0, 1.0).unwrap();
        let y = step_forward(&m, &[x], h).unwrap();
        prop_assert!(y[0] >= 0.0 && y[0] <= 1.0 + 1e-15);
    }

    #[test]
    fn si_invariant(s in 0.0f64..1.0, frac in 0.0f64..1.0, h in 0.001f64..0.999) {
        let m = make_si(1.0, 1.0).unwrap();
        let x = [s, (1.0 - s) * frac];
        let y = step_forward(&m, &x, h).unwrap();
        prop_assert!(y[0] >= 0.0 && y[1] >= 0.0);
        prop_assert!((y[0] + y[1] - x[0] - x[1]).abs() <= 1e-15);
    }
}
