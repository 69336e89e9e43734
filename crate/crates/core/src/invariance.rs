//! Tangent conditions and invariance audits on convex polyhedral domains.
//!
//! Continuous: `n(x) · f(x) <= 0` on the boundary. Discrete (for the
//! reversible step): `n(x) · (F(-h, x) - x) >= 0` on the boundary. Both are
//! checked on sampled boundary points with per-facet constant outer normals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{NsfdError, Result};
use crate::integrator::{reversibility_residual, step, step_backward, step_bound, Scheme};
use crate::linalg::{dot, norm_inf};
use crate::model::{Domain, Facet, FacetKind, MassActionModel};

const MAX_ATTEMPTS: usize = 100_000;
/// Relative slack for domain membership in audits.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;
const ACTIVE_FACET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySample {
    pub point: Vec<f64>,
    pub facet: FacetKind,
}

/// Which facets a tangent check visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FacetFilter {
    #[default]
    All,
    /// Only the linear constraints `u · x <= M`.
    Constraints,
    /// Only the coordinate facets `x_i = 0`.
    Coordinates,
}

impl FacetFilter {
    fn keeps(self, kind: FacetKind) -> bool {
        matches!(
            (self, kind),
            (FacetFilter::All, _)
                | (FacetFilter::Constraints, FacetKind::Constraint(_))
                | (FacetFilter::Coordinates, FacetKind::Coordinate(_))
        )
    }
}

#[cfg(test)]
fn facet_with_kind(facets: &[Facet], kind: FacetKind) -> &Facet {
    facets
        .iter()
        .find(|f| f.kind == kind)
        .expect("facet kind comes from the same domain")
}

/// Deterministic sample of `count` boundary points, each on a recorded facet.
///
/// Facets are chosen uniformly; the free coordinates are uniform on the domain
/// box and rejected until the point is feasible. On a linear constraint one
/// coordinate with nonzero normal entry is solved from the active equality.
pub fn sample_boundary(domain: &Domain, count: usize, seed: u64) -> Result<Vec<BoundarySample>> {
    sample_boundary_filtered(domain, count, seed, FacetFilter::All)
}

pub fn sample_boundary_filtered(
    domain: &Domain,
    count: usize,
    seed: u64,
    filter: FacetFilter,
) -> Result<Vec<BoundarySample>> {
    domain.require_compact()?;
    if count == 0 {
        return Err(NsfdError::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    let mut facets: Vec<Facet> = domain
        .facets()
        .into_iter()
        .filter(|f| filter.keeps(f.kind))
        .collect();
    if facets.is_empty() {
        return Err(NsfdError::EmptyDomain(
            "no facets match the requested filter".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if facets.is_empty() {
            return Err(NsfdError::EmptyDomain(
                "no boundary facet admits a feasible point".into(),
            ));
        }
        let idx = rng.random_range(0..facets.len());
        match sample_on_facet(domain, &facets[idx], &mut rng) {
            Some(point) => out.push(BoundarySample {
                point,
                facet: facets[idx].kind,
            }),
            None => {
                facets.remove(idx);
            }
        }
    }
    Ok(out)
}

fn sample_on_facet(domain: &Domain, facet: &Facet, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let upper = domain.box_upper();
    let n = domain.dim();
    let pivots: Vec<usize> = (0..n).filter(|&i| facet.normal[i] != 0.0).collect();
    for _ in 0..MAX_ATTEMPTS {
        let mut x: Vec<f64> = (0..n).map(|i| rng.random::<f64>() * upper[i]).collect();
        match facet.kind {
            FacetKind::Coordinate(i) => x[i] = 0.0,
            FacetKind::Constraint(_) => {
                let k = pivots[rng.random_range(0..pivots.len())];
                let rest: f64 = (0..n)
                    .filter(|&j| j != k)
                    .map(|j| facet.normal[j] * x[j])
                    .sum();
                x[k] = (facet.bound - rest) / facet.normal[k];
                if !(x[k] >= 0.0 && x[k] <= upper[k]) {
                    continue;
                }
            }
        }
        let feasible = domain.facets().iter().all(|g| {
            if g.kind == facet.kind {
                let scale = 1.0 + g.bound.abs();
                g.margin(&x).abs() <= 1e-14 * scale
            } else {
                g.margin(&x) >= 0.0
            }
        });
        if feasible {
            return Some(x);
        }
    }
    None
}

/// Facets other than `primary` on which `x` also lies.
fn active_facets<'a>(
    facets: &'a [Facet],
    x: &[f64],
    primary: FacetKind,
) -> impl Iterator<Item = &'a Facet> + 'a {
    let scale = 1.0 + norm_inf(x);
    let x = x.to_vec();
    facets
        .iter()
        .filter(move |f| f.kind == primary || f.margin(&x).abs() <= ACTIVE_FACET_TOL * scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentOptions {
    pub count: usize,
    pub seed: u64,
    /// Relative tolerance; the absolute threshold at `x` is `tol * (1 + ‖x‖∞)`.
    pub tol: f64,
    pub facets: FacetFilter,
}

impl TangentOptions {
    pub fn continuous(count: usize, seed: u64) -> Self {
        Self {
            count,
            seed,
            tol: 1e-10,
            facets: FacetFilter::All,
        }
    }

    pub fn discrete(count: usize, seed: u64) -> Self {
        Self {
            count,
            seed,
            tol: 1e-12,
            facets: FacetFilter::All,
        }
    }

    pub fn with_facets(mut self, facets: FacetFilter) -> Self {
        self.facets = facets;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentViolation {
    pub point: Vec<f64>,
    pub facet: FacetKind,
    pub normal: Vec<f64>,
    pub bound: f64,
    pub value: f64,
    /// `x + f(x)` (continuous) or `F(-h, x)` (discrete); its facet margin has
    /// the wrong sign whenever the violation is genuine.
    pub witness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacetSummary {
    pub facet: FacetKind,
    pub evaluations: usize,
    /// Largest `n · f` (continuous) or smallest `n · Δ` (discrete) seen.
    pub worst: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentReport {
    pub samples: usize,
    pub evaluations: usize,
    pub worst_value: f64,
    pub worst_point: Vec<f64>,
    pub worst_facet: Option<FacetKind>,
    pub per_facet: Vec<FacetSummary>,
    pub violations: Vec<TangentViolation>,
    pub tolerance: f64,
}

impl TangentReport {
    pub fn facet_worst(&self, kind: FacetKind) -> Option<f64> {
        self.per_facet
            .iter()
            .find(|f| f.facet == kind)
            .and_then(|f| f.worst)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Sense {
    // violation when value > tol
    AtMostZero,
    // violation when value < -tol
    AtLeastZero,
}

fn tangent_check<E>(
    domain: &Domain,
    opts: &TangentOptions,
    sense: Sense,
    evaluate: E,
) -> Result<TangentReport>
where
    E: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let samples = sample_boundary_filtered(domain, opts.count, opts.seed, opts.facets)?;
    let facets = domain.facets();
    let mut per_facet: Vec<FacetSummary> = facets
        .iter()
        .filter(|f| opts.facets.keeps(f.kind))
        .map(|f| FacetSummary {
            facet: f.kind,
            evaluations: 0,
            worst: None,
        })
        .collect();
    let worse = |a: f64, b: f64| match sense {
        Sense::AtMostZero => a > b,
        Sense::AtLeastZero => a < b,
    };

    let mut report = TangentReport {
        samples: samples.len(),
        evaluations: 0,
        worst_value: match sense {
            Sense::AtMostZero => f64::NEG_INFINITY,
            Sense::AtLeastZero => f64::INFINITY,
        },
        worst_point: Vec::new(),
        worst_facet: None,
        per_facet: Vec::new(),
        violations: Vec::new(),
        tolerance: opts.tol,
    };

    for s in &samples {
        // displacement: f(x) or F(-h, x) - x
        let disp = evaluate(&s.point)?;
        let threshold = opts.tol * (1.0 + norm_inf(&s.point));
        for facet in active_facets(&facets, &s.point, s.facet) {
            if !opts.facets.keeps(facet.kind) {
                continue;
            }
            let value = dot(&facet.normal, &disp);
            report.evaluations += 1;
            if let Some(summary) = per_facet.iter_mut().find(|p| p.facet == facet.kind) {
                summary.evaluations += 1;
                if summary.worst.is_none_or(|w| worse(value, w)) {
                    summary.worst = Some(value);
                }
            }
            if worse(value, report.worst_value) {
                report.worst_value = value;
                report.worst_point = s.point.clone();
                report.worst_facet = Some(facet.kind);
            }
            let violated = match sense {
                Sense::AtMostZero => value > threshold,
                Sense::AtLeastZero => value < -threshold,
            };
            if violated {
                let witness = s.point.iter().zip(&disp).map(|(x, d)| x + d).collect();
                report.violations.push(TangentViolation {
                    point: s.point.clone(),
                    facet: facet.kind,
                    normal: facet.normal.clone(),
                    bound: facet.bound,
                    value,
                    witness,
                });
            }
        }
    }
    report.per_facet = per_facet;
    Ok(report)
}

/// `n(x) · f(x)` over sampled boundary points; violation when `> tol`.
pub fn continuous_tangent(
    model: &MassActionModel,
    domain: &Domain,
    opts: &TangentOptions,
) -> Result<TangentReport> {
    crate::error::NsfdError::check_dim(model.dim(), domain.dim())?;
    tangent_check(domain, opts, Sense::AtMostZero, |x| model.eval_f(x))
}

/// `n(x) · (F(-h, x) - x)` over sampled boundary points; violation when `< -tol`.
pub fn discrete_tangent(
    model: &MassActionModel,
    domain: &Domain,
    h: f64,
    opts: &TangentOptions,
) -> Result<TangentReport> {
    crate::error::NsfdError::check_dim(model.dim(), domain.dim())?;
    tangent_check(domain, opts, Sense::AtLeastZero, |x| {
        let back = step_backward(model, x, h)?;
        Ok(back.iter().zip(x).map(|(b, a)| b - a).collect())
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub trials: usize,
    pub steps: usize,
    pub seed: u64,
    pub scheme: Scheme,
    /// Relative membership slack.
    pub slack: f64,
}

impl AuditOptions {
    pub fn new(trials: usize, steps: usize, seed: u64) -> Self {
        Self {
            trials,
            steps,
            seed,
            scheme: Scheme::Nsfd,
            slack: MEMBERSHIP_SLACK,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitEvent {
    pub trial: usize,
    pub step: usize,
    pub margin: f64,
    pub state: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub scheme: Scheme,
    pub h: f64,
    pub trials: usize,
    pub steps: usize,
    pub seed: u64,
    /// Trials whose orbit left the domain.
    pub exits: usize,
    /// Trials stopped by a failed step.
    pub failures: usize,
    /// First exit of each exiting trial, in trial order.
    pub exit_events: Vec<ExitEvent>,
    /// Smallest facet margin over every visited state.
    pub worst_margin: f64,
    pub worst_trial: Option<usize>,
}

/// Uniform interior point by rejection from the domain box.
pub fn random_interior_point<R: Rng>(domain: &Domain, rng: &mut R) -> Result<Vec<f64>> {
    domain.require_compact()?;
    let upper = domain.box_upper();
    for _ in 0..MAX_ATTEMPTS {
        let x: Vec<f64> = upper.iter().map(|u| rng.random::<f64>() * u).collect();
        if domain.margin(&x) > 0.0 {
            return Ok(x);
        }
    }
    Err(NsfdError::EmptyDomain(
        "no interior point found by rejection".into(),
    ))
}

pub(crate) fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

struct TrialOutcome {
    exit: Option<ExitEvent>,
    failed: bool,
    worst_margin: f64,
}

/// Integrates `trials` orbits from random interior starts and records exits.
///
/// For the reversible scheme `h` must lie in `(0, h̄)`; comparison schemes are
/// run at any positive `h` and their exits merely counted.
pub fn invariance_audit(
    model: &MassActionModel,
    domain: &Domain,
    h: f64,
    opts: &AuditOptions,
) -> Result<AuditReport> {
    crate::error::NsfdError::check_dim(model.dim(), domain.dim())?;
    crate::integrator::check_step(h)?;
    domain.require_compact()?;
    if opts.scheme == Scheme::Nsfd {
        let bound = step_bound(model);
        if !bound.admits(h) {
            return Err(NsfdError::InvalidStep {
                h,
                reason: format!("must lie in (0, {}) for the reversible scheme", bound.h_bar),
            });
        }
    }

    let outcomes: Vec<Result<TrialOutcome>> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(opts.seed, trial);
            let mut x = random_interior_point(domain, &mut rng)?;
            let mut worst_margin = domain.margin(&x);
            for k in 0..opts.steps {
                let next = match step(model, opts.scheme, &x, h) {
                    Ok(v) => v,
                    Err(_) => {
                        return Ok(TrialOutcome {
                            exit: None,
                            failed: true,
                            worst_margin,
                        })
                    }
                };
                let margin = domain.margin(&next);
                worst_margin = worst_margin.min(margin);
                if margin.is_nan() || margin < -opts.slack * (1.0 + norm_inf(&next)) {
                    return Ok(TrialOutcome {
                        exit: Some(ExitEvent {
                            trial,
                            step: k + 1,
                            margin,
                            state: next,
                        }),
                        failed: false,
                        worst_margin,
                    });
                }
                x = next;
            }
            Ok(TrialOutcome {
                exit: None,
                failed: false,
                worst_margin,
            })
        })
        .collect();

    let mut report = AuditReport {
        scheme: opts.scheme,
        h,
        trials: opts.trials,
        steps: opts.steps,
        seed: opts.seed,
        exits: 0,
        failures: 0,
        exit_events: Vec::new(),
        worst_margin: f64::INFINITY,
        worst_trial: None,
    };
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        if outcome.failed {
            report.failures += 1;
        }
        if let Some(ev) = outcome.exit {
            report.exits += 1;
            report.exit_events.push(ev);
        }
        if outcome.worst_margin < report.worst_margin {
            report.worst_margin = outcome.worst_margin;
            report.worst_trial = Some(trial);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReversibilityReport {
    pub h: f64,
    pub trials: usize,
    pub seed: u64,
    pub max_residual: f64,
    /// Largest `residual / (1 + ‖x‖∞)`.
    pub max_relative: f64,
    pub worst_point: Option<Vec<f64>>,
}

/// Reversibility residual `‖F(-h, F(h, x)) - x‖∞` at random interior points.
pub fn reversibility_audit(
    model: &MassActionModel,
    h: f64,
    trials: usize,
    seed: u64,
) -> Result<ReversibilityReport> {
    let bound = step_bound(model);
    if !bound.admits(h) {
        return Err(NsfdError::InvalidStep {
            h,
            reason: format!("must lie in (0, {})", bound.h_bar),
        });
    }
    let domain = model.domain();
    let residuals: Vec<(f64, Vec<f64>)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let x = random_interior_point(domain, &mut trial_rng(seed, trial))?;
            Ok((reversibility_residual(model, &x, h)?, x))
        })
        .collect::<Result<_>>()?;
    let mut report = ReversibilityReport {
        h,
        trials,
        seed,
        max_residual: 0.0,
        max_relative: 0.0,
        worst_point: None,
    };
    for (r, x) in residuals {
        report.max_residual = report.max_residual.max(r);
        let rel = r / (1.0 + norm_inf(&x));
        if report.worst_point.is_none() || rel > report.max_relative {
            report.max_relative = rel;
            report.worst_point = Some(x);
        }
    }
    Ok(report)
}
