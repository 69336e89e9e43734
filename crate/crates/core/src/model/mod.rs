//! Mass-action vector fields in two-slot split form.
//!
//! A [`MassActionModel`] stores `f(x) = B(x, x) + L x + b`, where `B` is a sparse
//! bilinear map, `L` the linear rate matrix and `b` a constant inflow. The split
//! evaluator is
//!
//! ```text
//! φ(y, z) = B(y, z) + (L/2)(y + z) + b,     φ(x, x) = f(x)
//! ```
//!
//! and the slot matrices satisfy `P(y) z = Q(z) y = B(y, z)`.

mod domain;
mod json;
mod split;
mod validate;

use crate::error::{NsfdError, Result};
use crate::linalg::RealMatrix;

pub use domain::{Domain, Facet, FacetKind, LinearConstraint};
pub use json::{DomainSpec, ModelSpec, NonNegativeSpec};
pub use split::{GeneralSplitSystem, JacobianFn, PhiFn};
pub use validate::ValidationReport;

/// One entry of the bilinear map: contributes `c * y[j] * z[k]` to component `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearTerm {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

impl BilinearTerm {
    pub const fn new(i: usize, j: usize, k: usize, c: f64) -> Self {
        Self { i, j, k, c }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassActionModel {
    name: String,
    labels: Vec<String>,
    bilinear: Vec<BilinearTerm>,
    linear: RealMatrix,
    constant: Vec<f64>,
    domain: Domain,
}

impl MassActionModel {
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        bilinear: Vec<BilinearTerm>,
        linear: RealMatrix,
        constant: Vec<f64>,
        domain: Domain,
    ) -> Result<Self> {
        let n = constant.len();
        if n == 0 {
            return Err(NsfdError::InvalidModel(
                "dimension must be at least 1".into(),
            ));
        }
        if labels.len() != n {
            return Err(NsfdError::InvalidModel(format!(
                "{} labels for dimension {n}",
                labels.len()
            )));
        }
        if linear.rows() != n || linear.cols() != n {
            return Err(NsfdError::InvalidModel(format!(
                "linear matrix is {}x{}, expected {n}x{n}",
                linear.rows(),
                linear.cols()
            )));
        }
        if domain.dim() != n {
            return Err(NsfdError::InvalidModel(format!(
                "domain has dimension {}, expected {n}",
                domain.dim()
            )));
        }
        if !linear.is_finite() || constant.iter().any(|v| !v.is_finite()) {
            return Err(NsfdError::InvalidModel("non-finite rate entries".into()));
        }
        for (idx, t) in bilinear.iter().enumerate() {
            if t.i >= n || t.j >= n || t.k >= n {
                return Err(NsfdError::InvalidModel(format!(
                    "bilinear term {idx} has index out of range for dimension {n}"
                )));
            }
            if !t.c.is_finite() || t.c == 0.0 {
                return Err(NsfdError::InvalidModel(format!(
                    "bilinear term {idx} has coefficient {} (must be finite and nonzero)",
                    t.c
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            labels,
            bilinear,
            linear,
            constant,
            domain,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.constant.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn bilinear(&self) -> &[BilinearTerm] {
        &self.bilinear
    }

    pub fn linear(&self) -> &RealMatrix {
        &self.linear
    }

    pub fn constant(&self) -> &[f64] {
        &self.constant
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Same model on a different domain.
    pub fn with_domain(mut self, domain: Domain) -> Result<Self> {
        NsfdError::check_dim(self.dim(), domain.dim())?;
        self.domain = domain;
        Ok(self)
    }

    pub(crate) fn check(&self, x: &[f64]) -> Result<()> {
        NsfdError::check_dim(self.dim(), x.len())
    }

    /// `B(y, z)`.
    pub fn eval_bilinear(&self, y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        self.check(y)?;
        self.check(z)?;
        let mut out = vec![0.0; self.dim()];
        for t in &self.bilinear {
            out[t.i] += t.c * y[t.j] * z[t.k];
        }
        Ok(out)
    }

    /// The split evaluator `φ(y, z) = B(y, z) + (L/2)(y + z) + b`.
    pub fn eval_phi(&self, y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.eval_bilinear(y, z)?;
        let n = self.dim();
        for (i, o) in out.iter_mut().enumerate() {
            let mut lin = 0.0;
            for j in 0..n {
                lin += (0.5 * self.linear[(i, j)]) * (y[j] + z[j]);
            }
            *o += lin + self.constant[i];
        }
        Ok(out)
    }

    /// `f(x) = φ(x, x)`; shares the evaluation path with [`Self::eval_phi`] so the
    /// two agree bit-for-bit on the diagonal.
    pub fn eval_f(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.eval_phi(x, x)
    }

    /// `P(y)` with `P(y)_{ik} = Σ c y_j` over terms `(i, j, k, c)`.
    pub fn assemble_p(&self, y: &[f64]) -> Result<RealMatrix> {
        self.check(y)?;
        let mut p = RealMatrix::zeros(self.dim(), self.dim());
        for t in &self.bilinear {
            p[(t.i, t.k)] += t.c * y[t.j];
        }
        Ok(p)
    }

    /// `Q(z)` with `Q(z)_{ij} = Σ c z_k` over terms `(i, j, k, c)`.
    pub fn assemble_q(&self, z: &[f64]) -> Result<RealMatrix> {
        self.check(z)?;
        let mut q = RealMatrix::zeros(self.dim(), self.dim());
        for t in &self.bilinear {
            q[(t.i, t.j)] += t.c * z[t.k];
        }
        Ok(q)
    }

    /// `P(x) + Q(x)` in one pass.
    pub fn assemble_p_plus_q(&self, x: &[f64]) -> Result<RealMatrix> {
        self.check(x)?;
        let mut m = RealMatrix::zeros(self.dim(), self.dim());
        for t in &self.bilinear {
            m[(t.i, t.k)] += t.c * x[t.j];
            m[(t.i, t.j)] += t.c * x[t.k];
        }
        Ok(m)
    }

    /// Splitting matrix `S(x) = (P(x) + Q(x))/2 + L/2` of the scheme.
    pub fn split_matrix(&self, x: &[f64]) -> Result<RealMatrix> {
        let pq = self.assemble_p_plus_q(x)?;
        Ok(pq.add_scaled(1.0, &self.linear)?.scaled(0.5))
    }

    /// Analytic `∂f/∂x = P(x) + Q(x) + L`.
    pub fn jacobian_f(&self, x: &[f64]) -> Result<RealMatrix> {
        self.assemble_p_plus_q(x)?.add_scaled(1.0, &self.linear)
    }

    /// Whether `u · f(x)` vanishes identically, checked on the coefficients:
    /// `uᵀB ≡ 0` per monomial, `uᵀL = 0` and `u · b = 0`.
    pub fn is_linear_first_integral(&self, u: &[f64]) -> Result<bool> {
        self.check(u)?;
        let n = self.dim();
        let scale = 1.0 + crate::linalg::norm_inf(u);
        let tol = 1e-14 * scale;
        let mut monomials: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
        for t in &self.bilinear {
            let key = (t.j.min(t.k), t.j.max(t.k));
            *monomials.entry(key).or_default() += u[t.i] * t.c;
        }
        let bilinear_ok = monomials
            .values()
            .all(|v| v.abs() <= tol * self.bilinear.iter().map(|t| t.c.abs()).fold(1.0, f64::max));
        let linear_ok = (0..n).all(|j| {
            let s: f64 = (0..n).map(|i| u[i] * self.linear[(i, j)]).sum();
            s.abs() <= tol * (1.0 + self.linear.norm_inf())
        });
        let constant_ok = crate::linalg::dot(u, &self.constant).abs()
            <= tol * (1.0 + crate::linalg::norm_inf(&self.constant));
        Ok(bilinear_ok && linear_ok && constant_ok)
    }
}
