//! The reversible NSFD step and its companions.
//!
//! For a mass-action model the nonlocal scheme
//!
//! ```text
//! (x' - x) / h = ½ (φ(x', x) + φ(x, x'))
//! ```
//!
//! is linear in `x'`:
//!
//! ```text
//! (I - h S(x)) x' = (I + (h/2) L) x + h b,     S(x) = (P(x) + Q(x))/2 + L/2
//! ```
//!
//! and the inverse map is the same solve with `h -> -h`. Both are computed
//! directly by LU, so reversibility holds to round-off.

mod baseline;
mod bound;
mod newton;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{NsfdError, Result};
use crate::linalg::{
    dominance_violation, lu_solve, max_abs_diff, norm_inf, DominanceMode, RealMatrix,
};
use crate::model::{GeneralSplitSystem, MassActionModel};

pub use baseline::{step_euler, step_rk4, step_trapezoidal};
pub use bound::{
    step_bound, step_bound_with, ColumnBound, StepBoundOptions, StepBoundReport, DEFAULT_H_MAX,
};
pub(crate) use newton::newton_solve;
pub use newton::NewtonOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Reversible nonlocal scheme (the default).
    Nsfd,
    /// Explicit Euler, first-order comparison baseline.
    Euler,
    /// Classical four-stage explicit Runge–Kutta.
    Rk4,
    /// Implicit trapezoidal rule on `f`.
    Trapezoidal,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Nsfd,
        Scheme::Euler,
        Scheme::Rk4,
        Scheme::Trapezoidal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Nsfd => "nsfd",
            Scheme::Euler => "euler",
            Scheme::Rk4 => "rk4",
            Scheme::Trapezoidal => "trapezoidal",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = NsfdError;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                NsfdError::InvalidParameter(format!(
                    "unknown scheme '{s}' (expected nsfd, euler, rk4 or trapezoidal)"
                ))
            })
    }
}

/// Uniformly spaced discrete orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub t0: f64,
    pub h: f64,
    pub states: Vec<Vec<f64>>,
    pub scheme: Scheme,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.h
    }

    pub fn final_state(&self) -> &[f64] {
        self.states
            .last()
            .expect("trajectory always holds the initial state")
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64])> + '_ {
        self.states
            .iter()
            .enumerate()
            .map(move |(k, x)| (self.time(k), x.as_slice()))
    }
}

pub(crate) fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(NsfdError::InvalidStep {
            h,
            reason: "step size must be positive and finite".into(),
        })
    }
}

fn solve_dominant(lhs: &RealMatrix, rhs: &[f64], h: f64) -> Result<Vec<f64>> {
    if let Some(column) = dominance_violation(lhs, DominanceMode::Column, true) {
        return Err(NsfdError::NotDominant { column, h });
    }
    lu_solve(lhs, rhs)
}

/// `F(h, x)`: one forward step of the reversible scheme.
pub fn step_forward(model: &MassActionModel, x: &[f64], h: f64) -> Result<Vec<f64>> {
    signed_step(model, x, h)
}

/// `F(-h, x)`: exact inverse of [`step_forward`].
pub fn step_backward(model: &MassActionModel, x: &[f64], h: f64) -> Result<Vec<f64>> {
    check_step(h)?;
    signed_step(model, x, -h)
}

// (I - τ S(x)) y = (I + (τ/2) L) x + τ b for signed τ.
fn signed_step(model: &MassActionModel, x: &[f64], tau: f64) -> Result<Vec<f64>> {
    check_step(tau.abs())?;
    model.check(x)?;
    let n = model.dim();
    let s = model.split_matrix(x)?;
    let lhs = RealMatrix::identity(n).add_scaled(-tau, &s)?;
    let lx = model.linear().mul_vec(x)?;
    let rhs: Vec<f64> = (0..n)
        .map(|i| x[i] + 0.5 * tau * lx[i] + tau * model.constant()[i])
        .collect();
    solve_dominant(&lhs, &rhs, tau.abs())
}

/// Implicit step `y = x + (h/2)(φ(y, x) + φ(x, y))` for an arbitrary split system,
/// by damped Newton from the explicit Euler guess.
pub fn step_implicit_general(
    sys: &GeneralSplitSystem,
    x: &[f64],
    h: f64,
    opts: &NewtonOptions,
) -> Result<Vec<f64>> {
    check_step(h)?;
    NsfdError::check_dim(sys.dim(), x.len())?;
    let fx = sys.f(x)?;
    let guess: Vec<f64> = x.iter().zip(&fx).map(|(a, f)| a + h * f).collect();

    let residual = |y: &[f64]| -> Result<Vec<f64>> {
        let a = sys.phi(y, x)?;
        let b = sys.phi(x, y)?;
        Ok((0..y.len())
            .map(|i| y[i] - x[i] - 0.5 * h * (a[i] + b[i]))
            .collect())
    };
    let jacobian = |y: &[f64]| -> Result<RealMatrix> {
        let n = y.len();
        let dy = match sys.dphi_dy(y, x) {
            Some(m) => m,
            None => {
                crate::linalg::fd_jacobian(|v| sys.phi(v, x), y, crate::linalg::default_fd_eps(y))?
            }
        };
        let dz = match sys.dphi_dz(x, y) {
            Some(m) => m,
            None => {
                crate::linalg::fd_jacobian(|v| sys.phi(x, v), y, crate::linalg::default_fd_eps(y))?
            }
        };
        RealMatrix::identity(n).add_scaled(-0.5 * h, &dy.add_scaled(1.0, &dz)?)
    };
    Ok(newton_solve(residual, jacobian, guess, opts)?.point)
}

/// One step of any supported scheme.
pub fn step(model: &MassActionModel, scheme: Scheme, x: &[f64], h: f64) -> Result<Vec<f64>> {
    match scheme {
        Scheme::Nsfd => step_forward(model, x, h),
        Scheme::Euler => step_euler(model, x, h),
        Scheme::Rk4 => step_rk4(model, x, h),
        Scheme::Trapezoidal => step_trapezoidal(model, x, h, &NewtonOptions::default()),
    }
}

/// Iterates the reversible scheme `steps` times from `x0`.
pub fn integrate(model: &MassActionModel, x0: &[f64], h: f64, steps: usize) -> Result<Trajectory> {
    integrate_with(model, Scheme::Nsfd, x0, h, steps)
}

pub fn integrate_with(
    model: &MassActionModel,
    scheme: Scheme,
    x0: &[f64],
    h: f64,
    steps: usize,
) -> Result<Trajectory> {
    check_step(h)?;
    model.check(x0)?;
    if scheme == Scheme::Nsfd {
        let bound = step_bound(model);
        if !bound.admits(h) {
            log::warn!(
                "step size {h} is not below the safe bound {} for model '{}'",
                bound.h_bar,
                model.name()
            );
        }
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.to_vec());
    for k in 0..steps {
        let next = step(model, scheme, &states[k], h).map_err(|e| NsfdError::StepFailed {
            step: k,
            source: Box::new(e),
        })?;
        states.push(next);
    }
    Ok(Trajectory {
        t0: 0.0,
        h,
        states,
        scheme,
    })
}

/// `‖F(-h, F(h, x)) - x‖∞`.
pub fn reversibility_residual(model: &MassActionModel, x: &[f64], h: f64) -> Result<f64> {
    let forward = step_forward(model, x, h)?;
    let back = step_backward(model, &forward, h)?;
    Ok(max_abs_diff(&back, x))
}

/// Relative reversibility residual `‖F(-h, F(h, x)) - x‖∞ / (1 + ‖x‖∞)`.
pub fn relative_reversibility_residual(model: &MassActionModel, x: &[f64], h: f64) -> Result<f64> {
    Ok(reversibility_residual(model, x, h)? / (1.0 + norm_inf(x)))
}

#[cfg(test)]
mod tests;
