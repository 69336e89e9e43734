//! Declarative model files.
//!
//! ```json
//! {"name": "logistic", "dim": 1, "labels": ["x"],
//!  "bilinear": [{"i": 0, "j": 0, "k": 0, "c": -1.0}],
//!  "linear": [[1.0]], "constant": [0.0],
//!  "domain": {"nonnegative": true, "constraints": [{"normal": [1.0], "bound": 1.0}]}}
//! ```
//!
//! Unknown keys are rejected at every level.

use serde::{Deserialize, Serialize};

use super::{BilinearTerm, Domain, LinearConstraint, MassActionModel};
use crate::error::{NsfdError, Result};
use crate::linalg::RealMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub dim: usize,
    pub labels: Vec<String>,
    pub bilinear: Vec<TermSpec>,
    pub linear: Vec<Vec<f64>>,
    pub constant: Vec<f64>,
    pub domain: DomainSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub nonnegative: NonNegativeSpec,
    #[serde(default)]
    pub constraints: Vec<ConstraintSpec>,
}

/// Either one flag for every component or a per-component list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NonNegativeSpec {
    All(bool),
    PerComponent(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub normal: Vec<f64>,
    pub bound: f64,
}

impl TryFrom<ModelSpec> for MassActionModel {
    type Error = NsfdError;

    fn try_from(spec: ModelSpec) -> Result<Self> {
        let n = spec.dim;
        if spec.constant.len() != n {
            return Err(NsfdError::InvalidModel(format!(
                "\"constant\" has length {}, expected dim = {n}",
                spec.constant.len()
            )));
        }
        if spec.linear.len() != n || spec.linear.iter().any(|r| r.len() != n) {
            return Err(NsfdError::InvalidModel(format!(
                "\"linear\" must be a {n}x{n} row-major matrix"
            )));
        }
        let nonnegative = match spec.domain.nonnegative {
            NonNegativeSpec::All(flag) => vec![flag; n],
            NonNegativeSpec::PerComponent(v) => {
                if v.len() != n {
                    return Err(NsfdError::InvalidModel(format!(
                        "\"nonnegative\" has length {}, expected dim = {n}",
                        v.len()
                    )));
                }
                v
            }
        };
        let constraints = spec
            .domain
            .constraints
            .into_iter()
            .map(|c| LinearConstraint::new(c.normal, c.bound))
            .collect();
        let domain = Domain::new(nonnegative, constraints)?;
        let linear = if n == 0 {
            RealMatrix::zeros(0, 0)
        } else {
            RealMatrix::from_rows(&spec.linear)?
        };
        let bilinear = spec
            .bilinear
            .into_iter()
            .map(|t| BilinearTerm::new(t.i, t.j, t.k, t.c))
            .collect();
        MassActionModel::new(
            spec.name,
            spec.labels,
            bilinear,
            linear,
            spec.constant,
            domain,
        )
    }
}

impl From<&MassActionModel> for ModelSpec {
    fn from(m: &MassActionModel) -> Self {
        let nonneg = m.domain().nonnegative();
        let nonnegative = if nonneg.iter().all(|&b| b) {
            NonNegativeSpec::All(true)
        } else {
            NonNegativeSpec::PerComponent(nonneg.to_vec())
        };
        ModelSpec {
            name: m.name().to_string(),
            dim: m.dim(),
            labels: m.labels().to_vec(),
            bilinear: m
                .bilinear()
                .iter()
                .map(|t| TermSpec {
                    i: t.i,
                    j: t.j,
                    k: t.k,
                    c: t.c,
                })
                .collect(),
            linear: m.linear().to_rows(),
            constant: m.constant().to_vec(),
            domain: DomainSpec {
                nonnegative,
                constraints: m
                    .domain()
                    .constraints()
                    .iter()
                    .map(|c| ConstraintSpec {
                        normal: c.normal.clone(),
                        bound: c.bound,
                    })
                    .collect(),
            },
        }
    }
}

impl MassActionModel {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(text)
            .map_err(|e| NsfdError::InvalidModel(format!("model JSON: {e}")))?;
        spec.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ModelSpec::from(self))
            .expect("model spec is always serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LOGISTIC: &str = r#"{"name": "logistic", "dim": 1, "labels": ["x"],
        "bilinear": [{"i": 0, "j": 0, "k": 0, "c": -1.0}],
        "linear": [[1.0]], "constant": [0.0],
        "domain": {"nonnegative": true, "constraints": [{"normal": [1.0], "bound": 1.0}]}}"#;

    #[test]
    fn parses_logistic() {
        let m = MassActionModel::from_json_str(LOGISTIC).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(m.eval_f(&[0.5]).unwrap(), vec![0.25]);
        assert_eq!(m.domain().box_upper(), &[1.0]);
    }

    #[test]
    fn rejects_unknown_keys() {
        let extra = LOGISTIC.replacen("\"dim\": 1", "\"dim\": 1, \"extra\": 3", 1);
        assert!(MassActionModel::from_json_str(&extra).is_err());
        let extra_term = LOGISTIC.replacen("\"c\": -1.0", "\"c\": -1.0, \"d\": 0", 1);
        assert!(MassActionModel::from_json_str(&extra_term).is_err());
        let extra_domain = LOGISTIC.replacen(
            "\"nonnegative\": true",
            "\"nonnegative\": true, \"x\": 1",
            1,
        );
        assert!(MassActionModel::from_json_str(&extra_domain).is_err());
    }

    #[test]
    fn per_component_nonnegativity() {
        let text = LOGISTIC.replacen("\"nonnegative\": true", "\"nonnegative\": [false]", 1);
        let m = MassActionModel::from_json_str(&text).unwrap();
        assert_eq!(m.domain().nonnegative(), &[false]);
        let bad = LOGISTIC.replacen("\"nonnegative\": true", "\"nonnegative\": [true, true]", 1);
        assert!(MassActionModel::from_json_str(&bad).is_err());
    }

    #[test]
    fn dimension_mismatches_rejected() {
        let bad = LOGISTIC.replacen("\"dim\": 1", "\"dim\": 2", 1);
        assert!(MassActionModel::from_json_str(&bad).is_err());
        assert!(MassActionModel::from_json_str("{not json").is_err());
    }

    #[test]
    fn export_reparses_identically() {
        let m = MassActionModel::from_json_str(LOGISTIC).unwrap();
        let again = MassActionModel::from_json_str(&m.to_json_string()).unwrap();
        assert_eq!(m, again);
    }
}
