use std::fs;

use nsfd_core::analysis::{observed_order_with, steps_for};
use nsfd_core::invariance::sample_boundary_filtered;
use nsfd_core::{
    builtin, continuous_tangent, discrete_tangent, find_equilibria, integrate_with,
    invariance_audit, reversibility_audit, reversibility_residual, stability_report,
    step_bound_with, AuditOptions, AuditReport, EquilibriumResult, EquilibriumStatus, FacetFilter,
    MassActionModel, NewtonOptions, NsfdError, ReversibilityReport, Scheme, StabilityReport,
    StepBoundOptions, TangentOptions, TangentReport,
};
use serde::Serialize;

use crate::output::{emit, emit_json, trajectory_csv};
use crate::{CliError, ModelArgs, OutArgs};

/// Relative residual accepted by `reversibility --strict`.
const REVERSIBILITY_TOL: f64 = 1e-11;

pub fn load(args: &ModelArgs) -> Result<MassActionModel, CliError> {
    match (&args.model, &args.builtin) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            Ok(MassActionModel::from_json_str(&text)?)
        }
        (None, Some(name)) => Ok(builtin(name, &args.params)?),
        (None, None) => Err(CliError::Input(
            "one of --model or --builtin is required".into(),
        )),
    }
}

fn warn_if_unsafe(model: &MassActionModel, h: f64) {
    let bound = nsfd_core::step_bound(model);
    if !bound.admits(h) {
        eprintln!(
            "warning: h = {h} is not below the safe step bound {} of model '{}'",
            bound.h_bar,
            model.name()
        );
    }
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    args: &ModelArgs,
    x0: &[f64],
    h: f64,
    steps: Option<usize>,
    t_final: Option<f64>,
    scheme: Scheme,
    precision: usize,
    out: &OutArgs,
) -> Result<(), CliError> {
    let model = load(args)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(CliError::Input(format!(
            "h must be positive and finite, got {h}"
        )));
    }
    let steps = match (steps, t_final) {
        (Some(n), _) => n,
        (None, Some(0.0)) => 0,
        (None, Some(t)) => steps_for(t, h)?,
        (None, None) => {
            return Err(CliError::Input(
                "one of --steps or --t-final is required".into(),
            ))
        }
    };
    if scheme == Scheme::Nsfd {
        warn_if_unsafe(&model, h);
    }
    let traj = integrate_with(&model, scheme, x0, h, steps)?;
    let rows = traj.iter().map(|(t, x)| (t, x.to_vec()));
    emit(out, &trajectory_csv(model.labels(), rows, precision))
}

pub fn step_bound(args: &ModelArgs, h_max: f64, out: &OutArgs) -> Result<(), CliError> {
    if !(h_max > 0.0 && h_max.is_finite()) {
        return Err(CliError::Input(format!(
            "--h-max must be positive and finite, got {h_max}"
        )));
    }
    let model = load(args)?;
    let report = step_bound_with(
        &model,
        &StepBoundOptions {
            h_max,
            ..Default::default()
        },
    );
    emit_json(out, &report)
}

pub fn order(
    args: &ModelArgs,
    x0: &[f64],
    t_final: f64,
    h: f64,
    scheme: Scheme,
    out: &OutArgs,
) -> Result<(), CliError> {
    let model = load(args)?;
    if scheme == Scheme::Nsfd {
        warn_if_unsafe(&model, h);
    }
    let estimate = observed_order_with(&model, scheme, x0, t_final, h)?;
    emit_json(out, &estimate)
}

#[derive(Serialize)]
struct EquilibriumEntry {
    #[serde(flatten)]
    result: EquilibriumResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<StabilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct StabilityOutput {
    model: String,
    h: f64,
    equilibria: Vec<EquilibriumEntry>,
    sign_disagreements: usize,
}

pub fn stability(
    args: &ModelArgs,
    seeds: &[Vec<f64>],
    h: f64,
    strict: bool,
    out: &OutArgs,
) -> Result<(), CliError> {
    let model = load(args)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(CliError::Input(format!(
            "h must be positive and finite, got {h}"
        )));
    }
    let found = find_equilibria(&model, seeds, &NewtonOptions::default())?;
    let mut disagreements = 0;
    let equilibria = found
        .into_iter()
        .map(|result| {
            let (report, error) = match result.status {
                EquilibriumStatus::NotConverged => (None, None),
                _ => match stability_report(&model, &result.point, h) {
                    Ok(r) => {
                        disagreements += r
                            .rows
                            .iter()
                            .filter(|row| !row.near_hyperbolic && !row.classification_agrees())
                            .count();
                        (Some(r), None)
                    }
                    Err(e) => (None, Some(e.to_string())),
                },
            };
            EquilibriumEntry {
                result,
                report,
                error,
            }
        })
        .collect();
    emit_json(
        out,
        &StabilityOutput {
            model: model.name().to_string(),
            h,
            equilibria,
            sign_disagreements: disagreements,
        },
    )?;
    if strict && disagreements > 0 {
        return Err(CliError::Strict(format!(
            "{disagreements} eigenvalue classifications disagree"
        )));
    }
    Ok(())
}

pub struct InvarianceArgs {
    pub h: f64,
    pub trials: usize,
    pub steps: usize,
    pub seed: u64,
    pub samples: usize,
    pub scheme: Scheme,
}

#[derive(Serialize)]
struct InvarianceOutput {
    model: String,
    h: f64,
    h_bar: f64,
    scheme: Scheme,
    audit: AuditReport,
    continuous_tangent: TangentReport,
    /// Discrete condition on the linear-constraint facets.
    #[serde(skip_serializing_if = "Option::is_none")]
    discrete_tangent: Option<TangentReport>,
    /// Discrete condition on coordinate facets; informational, positivity of
    /// the solve covers these.
    #[serde(skip_serializing_if = "Option::is_none")]
    discrete_tangent_coordinates: Option<TangentReport>,
}

fn has_facets(model: &MassActionModel, filter: FacetFilter) -> bool {
    sample_boundary_filtered(model.domain(), 1, 0, filter).is_ok()
}

pub fn invariance(
    args: &ModelArgs,
    inv: &InvarianceArgs,
    strict: bool,
    out: &OutArgs,
) -> Result<(), CliError> {
    let model = load(args)?;
    let domain = model.domain();
    let h_bar = nsfd_core::step_bound(&model).h_bar;
    let audit = invariance_audit(
        &model,
        domain,
        inv.h,
        &AuditOptions::new(inv.trials, inv.steps, inv.seed).with_scheme(inv.scheme),
    )?;
    let continuous = continuous_tangent(
        &model,
        domain,
        &TangentOptions::continuous(inv.samples, inv.seed),
    )?;
    let discrete = |filter: FacetFilter| -> Result<Option<TangentReport>, NsfdError> {
        if inv.scheme != Scheme::Nsfd || !has_facets(&model, filter) {
            return Ok(None);
        }
        let opts = TangentOptions::discrete(inv.samples, inv.seed).with_facets(filter);
        discrete_tangent(&model, domain, inv.h, &opts).map(Some)
    };
    let planes = discrete(FacetFilter::Constraints)?;
    let coordinates = discrete(FacetFilter::Coordinates)?;

    let mut problems = Vec::new();
    if audit.exits > 0 || audit.failures > 0 {
        problems.push(format!(
            "{} exits, {} failed trials",
            audit.exits, audit.failures
        ));
    }
    if !continuous.violations.is_empty() {
        problems.push(format!(
            "{} continuous tangent violations",
            continuous.violations.len()
        ));
    }
    if let Some(r) = planes.as_ref().filter(|r| !r.violations.is_empty()) {
        problems.push(format!(
            "{} discrete tangent violations",
            r.violations.len()
        ));
    }
    emit_json(
        out,
        &InvarianceOutput {
            model: model.name().to_string(),
            h: inv.h,
            h_bar,
            scheme: inv.scheme,
            audit,
            continuous_tangent: continuous,
            discrete_tangent: planes,
            discrete_tangent_coordinates: coordinates,
        },
    )?;
    if strict && !problems.is_empty() {
        return Err(CliError::Strict(problems.join("; ")));
    }
    Ok(())
}

pub fn reversibility(
    args: &ModelArgs,
    h: f64,
    trials: usize,
    seed: u64,
    x0: Option<&[f64]>,
    strict: bool,
    out: &OutArgs,
) -> Result<(), CliError> {
    let model = load(args)?;
    let report = match x0 {
        Some(x) => {
            let bound = nsfd_core::step_bound(&model);
            if !bound.admits(h) {
                return Err(NsfdError::InvalidStep {
                    h,
                    reason: format!("must lie in (0, {})", bound.h_bar),
                }
                .into());
            }
            let r = reversibility_residual(&model, x, h)?;
            ReversibilityReport {
                h,
                trials: 1,
                seed,
                max_residual: r,
                max_relative: r / (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()))),
                worst_point: Some(x.to_vec()),
            }
        }
        None => reversibility_audit(&model, h, trials, seed)?,
    };
    emit_json(out, &report)?;
    if strict && report.max_relative > REVERSIBILITY_TOL {
        return Err(CliError::Strict(format!(
            "relative residual {:e} exceeds {REVERSIBILITY_TOL:e}",
            report.max_relative
        )));
    }
    Ok(())
}

pub fn export_model(args: &ModelArgs, out: &OutArgs) -> Result<(), CliError> {
    let model = load(args)?;
    let mut text = model.to_json_string();
    text.push('\n');
    emit(out, &text)
}

pub fn validate(args: &ModelArgs, strict: bool, out: &OutArgs) -> Result<(), CliError> {
    let model = load(args)?;
    let report = model.validate();
    emit_json(out, &report)?;
    if strict && !report.all_pass() {
        return Err(CliError::Strict(format!(
            "failed: {}",
            report.failures().join(", ")
        )));
    }
    Ok(())
}
