//! Classical comparison schemes applied to `f` directly.

use super::{check_step, newton_solve, NewtonOptions};
use crate::error::Result;
use crate::linalg::RealMatrix;
use crate::model::MassActionModel;

fn axpy(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(x, d)| x + a * d).collect()
}

pub fn step_euler(model: &MassActionModel, x: &[f64], h: f64) -> Result<Vec<f64>> {
    check_step(h)?;
    let f = model.eval_f(x)?;
    Ok(axpy(x, h, &f))
}

pub fn step_rk4(model: &MassActionModel, x: &[f64], h: f64) -> Result<Vec<f64>> {
    check_step(h)?;
    let k1 = model.eval_f(x)?;
    let k2 = model.eval_f(&axpy(x, 0.5 * h, &k1))?;
    let k3 = model.eval_f(&axpy(x, 0.5 * h, &k2))?;
    let k4 = model.eval_f(&axpy(x, h, &k3))?;
    Ok((0..x.len())
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// `y = x + (h/2)(f(x) + f(y))`, Newton with the analytic Jacobian of `f`.
pub fn step_trapezoidal(
    model: &MassActionModel,
    x: &[f64],
    h: f64,
    opts: &NewtonOptions,
) -> Result<Vec<f64>> {
    check_step(h)?;
    let fx = model.eval_f(x)?;
    let guess = axpy(x, h, &fx);
    let n = x.len();
    let residual = |y: &[f64]| -> Result<Vec<f64>> {
        let fy = model.eval_f(y)?;
        Ok((0..n)
            .map(|i| y[i] - x[i] - 0.5 * h * (fx[i] + fy[i]))
            .collect())
    };
    let jacobian = |y: &[f64]| -> Result<RealMatrix> {
        RealMatrix::identity(n).add_scaled(-0.5 * h, &model.jacobian_f(y)?)
    };
    Ok(newton_solve(residual, jacobian, guess, opts)?.point)
}
