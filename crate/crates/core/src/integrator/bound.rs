//! Safe step size from interval-evaluated column sums of the splitting matrix.
//!
//! With `S(x) = (P(x) + Q(x))/2 + L/2`, each entry `S_ij(x)` is affine in `x`.
//! Bounding `|S_ij|` over the domain box gives `U_j >= sup Σ_i |S_ij(x)|`, and
//! for every `h < 1 / max_j U_j` both `I - hS(x)` and `I + hS(x)` are strictly
//! column diagonally dominant on the whole box.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::MassActionModel;

pub const DEFAULT_H_MAX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBoundOptions {
    /// Cap applied when the column sums give no finite bound.
    pub h_max: f64,
    pub safety: f64,
}

impl Default for StepBoundOptions {
    fn default() -> Self {
        Self {
            h_max: DEFAULT_H_MAX,
            safety: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnBound {
    pub column: usize,
    /// `U_j`; `None` in JSON when unbounded on the domain box.
    #[serde(serialize_with = "finite_or_null")]
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepBoundReport {
    pub h_bar: f64,
    pub per_column: Vec<ColumnBound>,
    pub limiting_column: usize,
    /// The column sums gave `h̄ = +∞` (no coupling) or no bound at all
    /// (unbounded box); `h_bar` is then the configured cap.
    pub capped: bool,
    /// False when some column sum is infinite, i.e. the cap carries no
    /// dominance guarantee.
    pub certified: bool,
}

impl StepBoundReport {
    /// Whether `h` lies in the admissible interval `(0, h̄)`.
    pub fn admits(&self, h: f64) -> bool {
        h > 0.0 && h < self.h_bar
    }
}

fn finite_or_null<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

pub fn step_bound(model: &MassActionModel) -> StepBoundReport {
    step_bound_with(model, &StepBoundOptions::default())
}

pub fn step_bound_with(model: &MassActionModel, opts: &StepBoundOptions) -> StepBoundReport {
    let n = model.dim();
    let lower = model.domain().box_lower();
    let upper = model.domain().box_upper().to_vec();

    // affine coefficients of S_ij(x) by variable
    let mut coeffs: BTreeMap<(usize, usize), BTreeMap<usize, f64>> = BTreeMap::new();
    for t in model.bilinear() {
        *coeffs
            .entry((t.i, t.k))
            .or_default()
            .entry(t.j)
            .or_default() += 0.5 * t.c;
        *coeffs
            .entry((t.i, t.j))
            .or_default()
            .entry(t.k)
            .or_default() += 0.5 * t.c;
    }

    let per_column: Vec<ColumnBound> = (0..n)
        .map(|j| {
            let bound = (0..n)
                .map(|i| {
                    let base = 0.5 * model.linear()[(i, j)];
                    let (mut lo, mut hi) = (base, base);
                    if let Some(vars) = coeffs.get(&(i, j)) {
                        for (&v, &a) in vars {
                            if a == 0.0 {
                                continue;
                            }
                            let (p, q) = (a * lower[v], a * upper[v]);
                            lo += p.min(q);
                            hi += p.max(q);
                        }
                    }
                    lo.abs().max(hi.abs())
                })
                .sum::<f64>();
            ColumnBound { column: j, bound }
        })
        .collect();

    let (limiting_column, u_max) =
        per_column
            .iter()
            .map(|c| (c.column, c.bound))
            .fold((0, 0.0), |best, c| {
                if c.1 > best.1 || c.1.is_nan() {
                    c
                } else {
                    best
                }
            });

    let certified = per_column.iter().all(|c| c.bound.is_finite());
    let raw = opts.safety / u_max;
    if certified && raw.is_finite() && raw > 0.0 {
        StepBoundReport {
            h_bar: raw,
            per_column,
            limiting_column,
            capped: false,
            certified,
        }
    } else {
        StepBoundReport {
            h_bar: opts.h_max,
            per_column,
            limiting_column,
            capped: true,
            certified,
        }
    }
}
