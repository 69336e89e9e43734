use serde::Serialize;

use crate::error::{NsfdError, Result};
use crate::linalg::dot;

/// Half-space constraint `normal · x <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearConstraint {
    pub normal: Vec<f64>,
    pub bound: f64,
}

impl LinearConstraint {
    pub fn new(normal: Vec<f64>, bound: f64) -> Self {
        Self { normal, bound }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum FacetKind {
    /// `x_i >= 0`, outward normal `-e_i`.
    Coordinate(usize),
    /// Index into [`Domain::constraints`].
    Constraint(usize),
}

/// One bounding hyperplane of a polyhedral domain, written as `normal · x <= bound`
/// with `normal` the outward normal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Facet {
    pub kind: FacetKind,
    pub normal: Vec<f64>,
    pub bound: f64,
}

impl Facet {
    /// `bound - normal · x`; negative outside the half-space.
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.bound - dot(&self.normal, x)
    }
}

/// Convex polyhedral state domain: optional nonnegativity per component plus
/// linear constraints `u · x <= M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    nonnegative: Vec<bool>,
    constraints: Vec<LinearConstraint>,
    box_upper: Vec<f64>,
}

impl Domain {
    pub fn new(nonnegative: Vec<bool>, constraints: Vec<LinearConstraint>) -> Result<Self> {
        let n = nonnegative.len();
        for (idx, c) in constraints.iter().enumerate() {
            if c.normal.len() != n {
                return Err(NsfdError::InvalidModel(format!(
                    "constraint {idx}: normal has length {}, expected {n}",
                    c.normal.len()
                )));
            }
            if c.normal.iter().any(|v| !v.is_finite()) || !c.bound.is_finite() {
                return Err(NsfdError::InvalidModel(format!(
                    "constraint {idx}: non-finite entries"
                )));
            }
            if c.normal.iter().all(|v| *v == 0.0) {
                return Err(NsfdError::InvalidModel(format!(
                    "constraint {idx}: normal is the zero vector"
                )));
            }
        }
        let box_upper = derive_box_upper(&nonnegative, &constraints);
        Ok(Self {
            nonnegative,
            constraints,
            box_upper,
        })
    }

    /// Nonnegative orthant with no further constraints.
    pub fn orthant(n: usize) -> Self {
        Self::new(vec![true; n], Vec::new()).expect("orthant is always valid")
    }

    /// All of ℝⁿ.
    pub fn unconstrained(n: usize) -> Self {
        Self::new(vec![false; n], Vec::new()).expect("free space is always valid")
    }

    pub fn dim(&self) -> usize {
        self.nonnegative.len()
    }

    pub fn nonnegative(&self) -> &[bool] {
        &self.nonnegative
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn box_upper(&self) -> &[f64] {
        &self.box_upper
    }

    pub fn box_lower(&self) -> Vec<f64> {
        self.nonnegative
            .iter()
            .map(|&nn| if nn { 0.0 } else { f64::NEG_INFINITY })
            .collect()
    }

    pub fn all_nonnegative(&self) -> bool {
        self.nonnegative.iter().all(|&b| b)
    }

    /// Compact when every component is bounded below by zero and above by the
    /// derived box.
    pub fn is_compact(&self) -> bool {
        self.all_nonnegative() && self.box_upper.iter().all(|u| u.is_finite())
    }

    pub fn require_compact(&self) -> Result<()> {
        if self.is_compact() {
            Ok(())
        } else {
            let free: Vec<usize> = (0..self.dim())
                .filter(|&i| !self.nonnegative[i] || !self.box_upper[i].is_finite())
                .collect();
            Err(NsfdError::DomainNotCompact(format!(
                "components {free:?} are not bounded on both sides"
            )))
        }
    }

    /// Coordinate facets first (in component order), then constraint facets.
    pub fn facets(&self) -> Vec<Facet> {
        let n = self.dim();
        let coordinate = self
            .nonnegative
            .iter()
            .enumerate()
            .filter(|(_, nn)| **nn)
            .map(|(i, _)| {
                let mut normal = vec![0.0; n];
                normal[i] = -1.0;
                Facet {
                    kind: FacetKind::Coordinate(i),
                    normal,
                    bound: 0.0,
                }
            });
        let linear = self.constraints.iter().enumerate().map(|(idx, c)| Facet {
            kind: FacetKind::Constraint(idx),
            normal: c.normal.clone(),
            bound: c.bound,
        });
        coordinate.chain(linear).collect()
    }

    /// Smallest facet margin; negative means outside.
    pub fn margin(&self, x: &[f64]) -> f64 {
        let coord = self
            .nonnegative
            .iter()
            .zip(x)
            .filter(|(nn, _)| **nn)
            .map(|(_, v)| *v);
        let lin = self.constraints.iter().map(|c| c.bound - dot(&c.normal, x));
        coord.chain(lin).fold(f64::INFINITY, f64::min)
    }

    /// Membership with an absolute slack.
    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        x.len() == self.dim() && self.margin(x) >= -slack
    }
}

// box_upper_i = min over constraints with u_i > 0 and u >= 0 elsewhere of M / u_i,
// valid only when the other components of that constraint are nonnegative.
fn derive_box_upper(nonnegative: &[bool], constraints: &[LinearConstraint]) -> Vec<f64> {
    let n = nonnegative.len();
    (0..n)
        .map(|i| {
            constraints
                .iter()
                .filter(|c| c.normal[i] > 0.0)
                .filter(|c| {
                    c.normal
                        .iter()
                        .enumerate()
                        .all(|(j, u)| j == i || (*u >= 0.0 && (*u == 0.0 || nonnegative[j])))
                })
                .map(|c| c.bound / c.normal[i])
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn host_vector_like(mv: f64, m: f64) -> Domain {
        Domain::new(
            vec![true; 5],
            vec![
                LinearConstraint::new(vec![1.0, 1.0, 0.0, 0.0, 0.0], mv),
                LinearConstraint::new(vec![0.0, 0.0, 1.0, 1.0, 1.0], m),
            ],
        )
        .unwrap()
    }

    #[test]
    fn box_from_simplex_constraints() {
        let d = host_vector_like(10.0, 20.0);
        assert_eq!(d.box_upper(), &[10.0, 10.0, 20.0, 20.0, 20.0]);
        assert!(d.is_compact());
    }

    #[test]
    fn orthant_is_not_compact() {
        let d = Domain::orthant(2);
        assert!(!d.is_compact());
        assert!(d.require_compact().is_err());
        assert!(d.box_upper().iter().all(|u| u.is_infinite()));
    }

    #[test]
    fn mixed_sign_constraint_gives_no_box() {
        let d = Domain::new(
            vec![true, true],
            vec![LinearConstraint::new(vec![1.0, -1.0], 1.0)],
        )
        .unwrap();
        assert!(d.box_upper().iter().all(|u| u.is_infinite()));
    }

    #[test]
    fn free_component_blocks_box() {
        let d = Domain::new(
            vec![true, false],
            vec![LinearConstraint::new(vec![1.0, 1.0], 1.0)],
        )
        .unwrap();
        assert!(d.box_upper()[0].is_infinite());
        assert_eq!(d.box_upper()[1], 1.0);
        assert!(!d.is_compact());
    }

    #[test]
    fn rejects_zero_normal() {
        let err = Domain::new(vec![true], vec![LinearConstraint::new(vec![0.0], 1.0)]);
        assert!(err.is_err());
        let err = Domain::new(vec![true], vec![LinearConstraint::new(vec![1.0, 1.0], 1.0)]);
        assert!(err.is_err());
    }

    #[test]
    fn facets_and_margins() {
        let d = host_vector_like(10.0, 20.0);
        let facets = d.facets();
        assert_eq!(facets.len(), 7);
        assert_eq!(facets[0].kind, FacetKind::Coordinate(0));
        assert_eq!(facets[5].kind, FacetKind::Constraint(0));
        let x = [4.0, 6.0, 1.0, 1.0, 1.0];
        assert_eq!(facets[5].margin(&x), 0.0);
        assert_eq!(d.margin(&x), 0.0);
        assert!(d.contains(&x, 0.0));
        assert!(!d.contains(&[4.0, 6.1, 1.0, 1.0, 1.0], 1e-12));
        assert!(!d.contains(&[-1e-9, 0.0, 0.0, 0.0, 0.0], 1e-12));
        assert!(d.contains(&[-1e-13, 0.0, 0.0, 0.0, 0.0], 1e-12));
    }
}
