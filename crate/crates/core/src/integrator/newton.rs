use serde::{Deserialize, Serialize};

use crate::error::{NsfdError, Result};
use crate::linalg::{lu_solve, norm_inf, RealMatrix};

/// Damped Newton settings shared by the implicit steps and the equilibrium finder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    /// Converged when `‖G(y)‖∞ <= tol * (1 + ‖y‖∞)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest step fraction tried before a non-decreasing step is accepted anyway.
    pub min_damping: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            min_damping: 1.0 / 64.0,
        }
    }
}

impl NewtonOptions {
    pub fn validate(&self) -> Result<()> {
        let damping_ok = self.min_damping > 0.0 && self.min_damping <= 1.0;
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_iter == 0 || !damping_ok {
            return Err(NsfdError::InvalidParameter(format!(
                "Newton options need tol > 0, max_iter >= 1, min_damping in (0, 1]: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct NewtonOutcome {
    pub point: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Solves `G(y) = 0` from `y0`; step length halves while the residual grows.
pub(crate) fn newton_solve<G, J>(
    residual: G,
    jacobian: J,
    y0: Vec<f64>,
    opts: &NewtonOptions,
) -> Result<NewtonOutcome>
where
    G: Fn(&[f64]) -> Result<Vec<f64>>,
    J: Fn(&[f64]) -> Result<RealMatrix>,
{
    opts.validate()?;
    let mut y = y0;
    let mut r = residual(&y)?;
    let mut rnorm = norm_inf(&r);
    for it in 0..opts.max_iter {
        if rnorm <= opts.tol * (1.0 + norm_inf(&y)) {
            return Ok(NewtonOutcome {
                point: y,
                residual: rnorm,
                iterations: it,
            });
        }
        let jac = jacobian(&y)?;
        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = lu_solve(&jac, &neg_r)?;

        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = y.iter().zip(&delta).map(|(a, d)| a + lambda * d).collect();
            let r_trial = residual(&trial)?;
            let n_trial = norm_inf(&r_trial);
            if n_trial <= rnorm || lambda <= opts.min_damping || !rnorm.is_finite() {
                y = trial;
                r = r_trial;
                rnorm = n_trial;
                break;
            }
            lambda *= 0.5;
        }
    }
    if rnorm <= opts.tol * (1.0 + norm_inf(&y)) {
        return Ok(NewtonOutcome {
            point: y,
            residual: rnorm,
            iterations: opts.max_iter,
        });
    }
    Err(NsfdError::NoConvergence {
        iterations: opts.max_iter,
        residual: rnorm,
    })
}
