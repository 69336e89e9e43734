//! Built-in models: logistic growth, the SI epidemic and a five-compartment
//! host-vector model with temporary immunity.

use serde::{Deserialize, Serialize};

use crate::error::{NsfdError, Result};
use crate::linalg::RealMatrix;
use crate::model::{BilinearTerm, Domain, LinearConstraint, MassActionModel};

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(NsfdError::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// `ẋ = r x (1 - x/K)` on `[0, K]`.
pub fn make_logistic(r: f64, k: f64) -> Result<MassActionModel> {
    require_positive("r", r)?;
    require_positive("K", k)?;
    MassActionModel::new(
        "logistic",
        vec!["x".into()],
        vec![BilinearTerm::new(0, 0, 0, -r / k)],
        RealMatrix::from_rows(&[[r]])?,
        vec![0.0],
        Domain::new(vec![true], vec![LinearConstraint::new(vec![1.0], k)])?,
    )
}

/// `Ṡ = -βSI`, `İ = βSI` on `{S, I >= 0, S + I <= N}`.
pub fn make_si(beta: f64, n: f64) -> Result<MassActionModel> {
    require_positive("beta", beta)?;
    require_positive("N", n)?;
    MassActionModel::new(
        "si",
        vec!["S".into(), "I".into()],
        vec![
            BilinearTerm::new(0, 0, 1, -beta),
            BilinearTerm::new(1, 0, 1, beta),
        ],
        RealMatrix::zeros(2, 2),
        vec![0.0, 0.0],
        Domain::new(
            vec![true, true],
            vec![LinearConstraint::new(vec![1.0, 1.0], n)],
        )?,
    )
}

/// Rates of the vector-borne model, state order `(S_v, I_v, S, I, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HostVectorParameters {
    /// Vector recruitment (amount/time).
    #[serde(rename = "Lambda_v")]
    pub lambda_v: f64,
    /// Vector death rate (1/time).
    pub mu_v: f64,
    /// Host-to-vector transmission (1/(amount·time)).
    pub p: f64,
    /// Host recruitment (amount/time).
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    /// Host death rate (1/time).
    pub mu: f64,
    /// Vector-to-host transmission (1/(amount·time)).
    pub q: f64,
    /// Recovery rate (1/time).
    pub alpha: f64,
    /// Loss-of-immunity rate (1/time).
    pub gamma: f64,
    /// Bound on total vectors.
    #[serde(rename = "M_v")]
    pub m_v: f64,
    /// Bound on total hosts.
    #[serde(rename = "M")]
    pub m: f64,
}

impl Default for HostVectorParameters {
    fn default() -> Self {
        Self {
            lambda_v: 2.0,
            mu_v: 0.2,
            p: 0.05,
            lambda: 1.0,
            mu: 0.1,
            q: 0.03,
            alpha: 0.2,
            gamma: 0.05,
            m_v: 10.0,
            m: 10.0,
        }
    }
}

impl HostVectorParameters {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("Lambda_v", self.lambda_v),
            ("mu_v", self.mu_v),
            ("p", self.p),
            ("Lambda", self.lambda),
            ("mu", self.mu),
            ("q", self.q),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("M_v", self.m_v),
            ("M", self.m),
        ] {
            require_positive(name, v)?;
        }
        if self.m_v < self.lambda_v / self.mu_v {
            return Err(NsfdError::InvalidParameter(format!(
                "M_v = {} must be at least Lambda_v/mu_v = {}",
                self.m_v,
                self.lambda_v / self.mu_v
            )));
        }
        if self.m < self.lambda / self.mu {
            return Err(NsfdError::InvalidParameter(format!(
                "M = {} must be at least Lambda/mu = {}",
                self.m,
                self.lambda / self.mu
            )));
        }
        Ok(())
    }

    /// `(Λ_v/μ_v, 0, Λ/μ, 0, 0)`.
    pub fn disease_free_equilibrium(&self) -> Vec<f64> {
        vec![
            self.lambda_v / self.mu_v,
            0.0,
            self.lambda / self.mu,
            0.0,
            0.0,
        ]
    }

    /// Outer normals of the two population planes: `u` (vectors) and `w` (hosts).
    pub fn population_normals() -> ([f64; 5], [f64; 5]) {
        ([1.0, 1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0, 1.0])
    }
}

pub fn make_host_vector(params: &HostVectorParameters) -> Result<MassActionModel> {
    params.check()?;
    let HostVectorParameters {
        lambda_v,
        mu_v,
        p,
        lambda,
        mu,
        q,
        alpha,
        gamma,
        m_v,
        m,
    } = *params;
    // first slot carries I and I_v, second slot S_v and S
    let bilinear = vec![
        BilinearTerm::new(0, 3, 0, -p),
        BilinearTerm::new(1, 3, 0, p),
        BilinearTerm::new(2, 1, 2, -q),
        BilinearTerm::new(3, 1, 2, q),
    ];
    let linear = RealMatrix::from_rows(&[
        [-mu_v, 0.0, 0.0, 0.0, 0.0],
        [0.0, -mu_v, 0.0, 0.0, 0.0],
        [0.0, 0.0, -mu, 0.0, gamma],
        [0.0, 0.0, 0.0, -(mu + alpha), 0.0],
        [0.0, 0.0, 0.0, alpha, -(mu + gamma)],
    ])?;
    let (u, w) = HostVectorParameters::population_normals();
    let domain = Domain::new(
        vec![true; 5],
        vec![
            LinearConstraint::new(u.to_vec(), m_v),
            LinearConstraint::new(w.to_vec(), m),
        ],
    )?;
    MassActionModel::new(
        "host-vector",
        ["S_v", "I_v", "S", "I", "R"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        bilinear,
        linear,
        vec![lambda_v, 0.0, lambda, 0.0, 0.0],
        domain,
    )
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["logistic", "si", "host-vector"];

/// Builds a named built-in with `key=value` parameter overrides.
///
/// Parameters: logistic `r`, `K`; si `beta`, `N`; host-vector `Lambda_v`,
/// `mu_v`, `p`, `Lambda`, `mu`, `q`, `alpha`, `gamma`, `M_v`, `M`.
pub fn builtin(name: &str, overrides: &[(String, f64)]) -> Result<MassActionModel> {
    let unknown =
        |key: &str| NsfdError::InvalidParameter(format!("model '{name}' has no parameter '{key}'"));
    match name {
        "logistic" => {
            let (mut r, mut k) = (1.0, 1.0);
            for (key, v) in overrides {
                match key.as_str() {
                    "r" => r = *v,
                    "K" => k = *v,
                    _ => return Err(unknown(key)),
                }
            }
            make_logistic(r, k)
        }
        "si" => {
            let (mut beta, mut n) = (1.0, 1.0);
            for (key, v) in overrides {
                match key.as_str() {
                    "beta" => beta = *v,
                    "N" => n = *v,
                    _ => return Err(unknown(key)),
                }
            }
            make_si(beta, n)
        }
        "host-vector" => {
            let mut p = HostVectorParameters::default();
            for (key, v) in overrides {
                let slot = match key.as_str() {
                    "Lambda_v" => &mut p.lambda_v,
                    "mu_v" => &mut p.mu_v,
                    "p" => &mut p.p,
                    "Lambda" => &mut p.lambda,
                    "mu" => &mut p.mu,
                    "q" => &mut p.q,
                    "alpha" => &mut p.alpha,
                    "gamma" => &mut p.gamma,
                    "M_v" => &mut p.m_v,
                    "M" => &mut p.m,
                    _ => return Err(unknown(key)),
                };
                *slot = *v;
            }
            make_host_vector(&p)
        }
        _ => Err(NsfdError::InvalidParameter(format!(
            "unknown built-in model '{name}' (expected one of {BUILTIN_NAMES:?})"
        ))),
    }
}
