//! Equilibria, elementary stability and observed order of accuracy.

use serde::Serialize;

use crate::error::{NsfdError, Result};
use crate::integrator::{
    check_step, integrate_with, newton_solve, step_forward, step_rk4, NewtonOptions, Scheme,
    Trajectory,
};
use crate::linalg::{
    default_fd_eps, eigenvalues, fd_jacobian, lu_solve, max_abs_diff, norm_inf, ComplexScalar,
};
use crate::model::MassActionModel;

/// Converged points closer than this are the same equilibrium.
pub const DEDUP_DISTANCE: f64 = 1e-8;
/// `‖f(x̄)‖∞` accepted as an equilibrium by [`stability_report`].
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-10;
/// `|Re λ|` below which an equilibrium is flagged as near-hyperbolic.
pub const NEAR_HYPERBOLIC: f64 = 1e-8;
/// Errors below this make the order estimate meaningless.
pub const DEGENERATE_ERROR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumStatus {
    Converged,
    /// `∂f/∂x` is singular at the returned point (non-isolated equilibrium or
    /// degenerate seed); inconclusive.
    SingularJacobian,
    NotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub seed_index: usize,
    pub point: Vec<f64>,
    pub status: EquilibriumStatus,
    pub residual: f64,
}

/// Damped Newton on `f` from every seed.
///
/// Converged points are deduplicated; seeds that end on a singular Jacobian
/// or fail to converge are kept with their status.
pub fn find_equilibria(
    model: &MassActionModel,
    seeds: &[Vec<f64>],
    opts: &NewtonOptions,
) -> Result<Vec<EquilibriumResult>> {
    let mut out: Vec<EquilibriumResult> = Vec::new();
    for (seed_index, seed) in seeds.iter().enumerate() {
        model.check(seed)?;
        let outcome = newton_solve(
            |x| model.eval_f(x),
            |x| model.jacobian_f(x),
            seed.clone(),
            opts,
        );
        let result = match outcome {
            Ok(o) => {
                let n = model.dim();
                let singular = lu_solve(&model.jacobian_f(&o.point)?, &vec![1.0; n]).is_err();
                EquilibriumResult {
                    seed_index,
                    status: if singular {
                        EquilibriumStatus::SingularJacobian
                    } else {
                        EquilibriumStatus::Converged
                    },
                    residual: o.residual,
                    point: o.point,
                }
            }
            Err(NsfdError::Singular { .. }) => EquilibriumResult {
                seed_index,
                residual: norm_inf(&model.eval_f(seed)?),
                point: seed.clone(),
                status: EquilibriumStatus::SingularJacobian,
            },
            Err(NsfdError::NoConvergence { residual, .. }) => EquilibriumResult {
                seed_index,
                point: seed.clone(),
                status: EquilibriumStatus::NotConverged,
                residual,
            },
            Err(e) => return Err(e),
        };
        let duplicate = result.status == EquilibriumStatus::Converged
            && out.iter().any(|r| {
                r.status == EquilibriumStatus::Converged
                    && max_abs_diff(&r.point, &result.point) < DEDUP_DISTANCE
            });
        if !duplicate {
            out.push(result);
        }
    }
    Ok(out)
}

/// Discrete eigenvalue `μ = (1 + hλ/2) / (1 - hλ/2)` of the step map at an
/// equilibrium with Jacobian eigenvalue `λ`.
pub fn mu_of_lambda(lambda: ComplexScalar, h: f64) -> Result<ComplexScalar> {
    let half = lambda.scale(0.5 * h);
    let den = ComplexScalar::ONE - half;
    if den.abs() < 1e-14 {
        return Err(NsfdError::Pole { modulus: den.abs() });
    }
    Ok((ComplexScalar::ONE + half) / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRow {
    pub lambda: ComplexScalar,
    pub mu_predicted: ComplexScalar,
    pub mu_measured: ComplexScalar,
    pub h: f64,
    pub mismatch: f64,
    /// `Re λ < 0`
    pub continuous_stable: bool,
    /// `|μ_measured| < 1`
    pub discrete_stable: bool,
    pub near_hyperbolic: bool,
    /// Second-nearest measured eigenvalue within twice the nearest distance.
    pub ambiguous: bool,
}

impl StabilityRow {
    pub fn classification_agrees(&self) -> bool {
        self.continuous_stable == self.discrete_stable
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub equilibrium: Vec<f64>,
    pub h: f64,
    pub rows: Vec<StabilityRow>,
    /// Rows whose stable/unstable classification differs between `λ` and `μ`.
    pub sign_disagreements: usize,
    pub max_mismatch: f64,
}

/// Pairs each eigenvalue of `∂f/∂x(x̄)` with an eigenvalue of the
/// finite-difference Jacobian of the step map at `x̄`.
pub fn stability_report(model: &MassActionModel, x_bar: &[f64], h: f64) -> Result<StabilityReport> {
    check_step(h)?;
    model.check(x_bar)?;
    let fnorm = norm_inf(&model.eval_f(x_bar)?);
    if fnorm > EQUILIBRIUM_TOLERANCE * (1.0 + norm_inf(x_bar)) {
        return Err(NsfdError::InvalidParameter(format!(
            "point is not an equilibrium (‖f‖∞ = {fnorm:e})"
        )));
    }
    let lambdas = eigenvalues(&model.jacobian_f(x_bar)?)?;
    let step_jac = fd_jacobian(|x| step_forward(model, x, h), x_bar, default_fd_eps(x_bar))?;
    let measured = eigenvalues(&step_jac)?;
    let predicted: Vec<ComplexScalar> = lambdas
        .iter()
        .map(|l| mu_of_lambda(*l, h))
        .collect::<Result<_>>()?;

    // greedy matching on globally sorted distances
    let n = predicted.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, p) in predicted.iter().enumerate() {
        for (j, m) in measured.iter().enumerate() {
            pairs.push(((*p - *m).abs(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut assigned = vec![None; n];
    let mut used = vec![false; n];
    for (_, i, j) in pairs {
        if assigned[i].is_none() && !used[j] {
            assigned[i] = Some(j);
            used[j] = true;
        }
    }

    let rows: Vec<StabilityRow> = (0..n)
        .map(|i| {
            let j = assigned[i].expect("square assignment is complete");
            let mu_measured = measured[j];
            let mut dists: Vec<f64> = measured.iter().map(|m| (predicted[i] - *m).abs()).collect();
            dists.sort_by(f64::total_cmp);
            let ambiguous = dists.len() > 1 && dists[1] < 2.0 * dists[0];
            StabilityRow {
                lambda: lambdas[i],
                mu_predicted: predicted[i],
                mu_measured,
                h,
                mismatch: (predicted[i] - mu_measured).abs(),
                continuous_stable: lambdas[i].re < 0.0,
                discrete_stable: mu_measured.abs() < 1.0,
                near_hyperbolic: lambdas[i].re.abs() < NEAR_HYPERBOLIC,
                ambiguous,
            }
        })
        .collect();
    let sign_disagreements = rows.iter().filter(|r| !r.classification_agrees()).count();
    let max_mismatch = rows.iter().map(|r| r.mismatch).fold(0.0, f64::max);
    Ok(StabilityReport {
        equilibrium: x_bar.to_vec(),
        h,
        rows,
        sign_disagreements,
        max_mismatch,
    })
}

/// Classical RK4 on `f` up to time `t_final`; the step is shrunk to `T/N` with
/// `N = ⌈T / h_ref⌉`.
pub fn rk4_reference(
    model: &MassActionModel,
    x0: &[f64],
    h_ref: f64,
    t_final: f64,
) -> Result<Trajectory> {
    check_step(h_ref)?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(NsfdError::InvalidParameter(format!(
            "final time must be nonnegative, got {t_final}"
        )));
    }
    model.check(x0)?;
    let steps = (t_final / h_ref - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 {
        h_ref
    } else {
        t_final / steps as f64
    };
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.to_vec());
    for k in 0..steps {
        let next = step_rk4(model, &states[k], h)?;
        states.push(next);
    }
    Ok(Trajectory {
        t0: 0.0,
        h,
        states,
        scheme: Scheme::Rk4,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub scheme: Scheme,
    pub t_final: f64,
    pub h: f64,
    pub error_h: f64,
    pub error_h2: f64,
    /// `log2(error_h / error_h2)`; `None` when either error is below round-off.
    pub p_hat: Option<f64>,
}

/// Number of steps of size `h` reaching `t_final`, when that is an integer.
pub fn steps_for(t_final: f64, h: f64) -> Result<usize> {
    check_step(h)?;
    let ratio = t_final / h;
    let n = ratio.round();
    if n.is_nan() || n < 1.0 || (ratio - n).abs() > 1e-9 * n.max(1.0) {
        return Err(NsfdError::InvalidStep {
            h,
            reason: format!("T/h = {ratio} must be a positive integer"),
        });
    }
    Ok(n as usize)
}

/// Observed order of the reversible scheme at `h` and `h/2` against an RK4
/// reference at `h/200`.
pub fn observed_order(
    model: &MassActionModel,
    x0: &[f64],
    t_final: f64,
    h: f64,
) -> Result<OrderEstimate> {
    observed_order_with(model, Scheme::Nsfd, x0, t_final, h)
}

pub fn observed_order_with(
    model: &MassActionModel,
    scheme: Scheme,
    x0: &[f64],
    t_final: f64,
    h: f64,
) -> Result<OrderEstimate> {
    let n = steps_for(t_final, h)?;
    let coarse = integrate_with(model, scheme, x0, h, n)?;
    let fine = integrate_with(model, scheme, x0, h / 2.0, 2 * n)?;
    let reference = rk4_reference(model, x0, h / 200.0, t_final)?;
    let exact = reference.final_state();
    let error_h = max_abs_diff(coarse.final_state(), exact);
    let error_h2 = max_abs_diff(fine.final_state(), exact);
    let p_hat = if error_h < DEGENERATE_ERROR || error_h2 < DEGENERATE_ERROR {
        None
    } else {
        Some((error_h / error_h2).log2())
    };
    Ok(OrderEstimate {
        scheme,
        t_final,
        h,
        error_h,
        error_h2,
        p_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{make_host_vector, make_logistic, make_si, HostVectorParameters};

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    #[test]
    fn mu_hand_values() {
        assert_eq!(mu_of_lambda(c(0.0, 0.0), 0.3).unwrap(), ComplexScalar::ONE);
        assert_eq!(
            mu_of_lambda(c(-2.0, 0.0), 1.0).unwrap(),
            ComplexScalar::ZERO
        );
        let mu = mu_of_lambda(c(0.0, 2.0), 1.0).unwrap();
        assert!((mu - c(0.0, 1.0)).abs() < 1e-15);
        assert!((mu.abs() - 1.0).abs() < 1e-15);
        assert!(matches!(
            mu_of_lambda(c(2.0, 0.0), 1.0),
            Err(NsfdError::Pole { .. })
        ));
    }

    #[test]
    fn logistic_equilibria() {
        let m = make_logistic(1.0, 1.0).unwrap();
        let eq = find_equilibria(
            &m,
            &[vec![0.1], vec![0.9], vec![0.05]],
            &NewtonOptions::default(),
        )
        .unwrap();
        assert_eq!(eq.len(), 2);
        assert!(eq.iter().all(|r| r.status == EquilibriumStatus::Converged));
        assert!(eq[0].point[0].abs() < 1e-12);
        assert!((eq[1].point[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn host_vector_dfe_from_nearby_seed() {
        let p = HostVectorParameters::default();
        let m = make_host_vector(&p).unwrap();
        let seed = vec![9.5, 0.01, 9.7, 0.01, 0.01];
        let eq = find_equilibria(&m, &[seed], &NewtonOptions::default()).unwrap();
        assert_eq!(eq[0].status, EquilibriumStatus::Converged);
        let dfe = p.disease_free_equilibrium();
        // Newton from near the DFE may land on the endemic point instead; accept either
        // but require f = 0 there.
        assert!(norm_inf(&m.eval_f(&eq[0].point).unwrap()) <= 1e-12);
        let eq =
            find_equilibria(&m, std::slice::from_ref(&dfe), &NewtonOptions::default()).unwrap();
        assert!(max_abs_diff(&eq[0].point, &dfe) < 1e-12);
    }

    #[test]
    fn si_reports_singular_jacobian() {
        let m = make_si(1.0, 1.0).unwrap();
        let eq = find_equilibria(
            &m,
            &[vec![0.7, 0.2], vec![0.4, 0.0]],
            &NewtonOptions::default(),
        )
        .unwrap();
        assert_eq!(eq.len(), 2);
        assert!(eq
            .iter()
            .all(|r| r.status == EquilibriumStatus::SingularJacobian));
        assert_eq!(eq[1].point, vec![0.4, 0.0]);
    }

    #[test]
    fn logistic_stability_rows() {
        let m = make_logistic(1.0, 1.0).unwrap();
        let r = stability_report(&m, &[1.0], 0.1).unwrap();
        let row = &r.rows[0];
        assert!((row.lambda.re + 1.0).abs() < 1e-14);
        assert!((row.mu_predicted.re - 0.95 / 1.05).abs() < 1e-15);
        assert!(row.mismatch <= 1e-6 * (1.0 + row.mu_predicted.abs()));
        assert!(row.continuous_stable && row.discrete_stable);

        let r = stability_report(&m, &[0.0], 0.1).unwrap();
        let row = &r.rows[0];
        assert!((row.mu_predicted.re - 1.05 / 0.95).abs() < 1e-15);
        assert!(!row.continuous_stable && !row.discrete_stable);
        assert_eq!(r.sign_disagreements, 0);
    }

    #[test]
    fn stability_requires_equilibrium() {
        let m = make_logistic(1.0, 1.0).unwrap();
        assert!(stability_report(&m, &[0.5], 0.1).is_err());
    }

    #[test]
    fn rk4_reference_exact_solutions() {
        let m = make_logistic(1.0, 1.0).unwrap();
        let t = rk4_reference(&m, &[0.5], 1e-3, 1.0).unwrap();
        let exact = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((t.final_state()[0] - exact).abs() < 1e-10);

        let decay = MassActionModel::new(
            "decay",
            vec!["x".into()],
            vec![],
            crate::linalg::RealMatrix::from_rows(&[[-1.0]]).unwrap(),
            vec![0.0],
            crate::model::Domain::orthant(1),
        )
        .unwrap();
        let t = rk4_reference(&decay, &[1.0], 1e-3, 1.0).unwrap();
        assert!((t.final_state()[0] - (-1.0f64).exp()).abs() < 1e-9);

        let frozen = MassActionModel::new(
            "zero",
            vec!["x".into()],
            vec![],
            crate::linalg::RealMatrix::zeros(1, 1),
            vec![0.0],
            crate::model::Domain::orthant(1),
        )
        .unwrap();
        let t = rk4_reference(&frozen, &[0.3], 0.1, 1.0).unwrap();
        assert!(t.states.iter().all(|x| x[0] == 0.3));
    }

    #[test]
    fn logistic_orders() {
        let m = make_logistic(1.0, 1.0).unwrap();
        let nsfd = observed_order(&m, &[0.5], 1.0, 0.1).unwrap();
        let p = nsfd.p_hat.unwrap();
        assert!((1.9..=2.1).contains(&p), "p_hat = {p}");
        let euler = observed_order_with(&m, Scheme::Euler, &[0.5], 1.0, 0.1).unwrap();
        let p = euler.p_hat.unwrap();
        assert!((0.9..=1.1).contains(&p), "p_hat = {p}");
    }

    #[test]
    fn order_at_equilibrium_is_undefined() {
        let m = make_logistic(1.0, 1.0).unwrap();
        let est = observed_order(&m, &[1.0], 1.0, 0.1).unwrap();
        assert!(est.p_hat.is_none());
    }

    #[test]
    fn order_needs_integer_step_count() {
        let m = make_logistic(1.0, 1.0).unwrap();
        assert!(observed_order(&m, &[0.5], 1.0, 0.3).is_err());
        assert_eq!(steps_for(5.0, 0.625).unwrap(), 8);
    }
}
