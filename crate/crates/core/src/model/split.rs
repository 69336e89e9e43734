use std::fmt;
use std::sync::Arc;

use super::{Domain, MassActionModel};
use crate::error::{NsfdError, Result};
use crate::linalg::RealMatrix;

pub type PhiFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&[f64], &[f64]) -> RealMatrix + Send + Sync>;

/// Arbitrary system `ẋ = φ(x, x)` given only through its split evaluator.
///
/// Partial Jacobians are optional; the implicit step falls back to central
/// differences when they are absent.
#[derive(Clone)]
pub struct GeneralSplitSystem {
    dim: usize,
    phi: PhiFn,
    dphi_dy: Option<JacobianFn>,
    dphi_dz: Option<JacobianFn>,
    domain: Domain,
}

impl GeneralSplitSystem {
    pub fn new(dim: usize, phi: PhiFn, domain: Domain) -> Result<Self> {
        NsfdError::check_dim(dim, domain.dim())?;
        Ok(Self {
            dim,
            phi,
            dphi_dy: None,
            dphi_dz: None,
            domain,
        })
    }

    pub fn with_jacobians(mut self, dphi_dy: JacobianFn, dphi_dz: JacobianFn) -> Self {
        self.dphi_dy = Some(dphi_dy);
        self.dphi_dz = Some(dphi_dz);
        self
    }

    /// Wraps a mass-action model through its `φ`, optionally with the analytic
    /// slot Jacobians `∂φ/∂y(y, z) = Q(z) + L/2`, `∂φ/∂z(y, z) = P(y) + L/2`.
    pub fn from_mass_action(model: &MassActionModel, analytic_jacobians: bool) -> Self {
        let m = Arc::new(model.clone());
        let phi_model = Arc::clone(&m);
        let phi: PhiFn = Arc::new(move |y, z| {
            phi_model
                .eval_phi(y, z)
                .expect("dimension checked by the implicit step")
        });
        let sys = Self {
            dim: model.dim(),
            phi,
            dphi_dy: None,
            dphi_dz: None,
            domain: model.domain().clone(),
        };
        if !analytic_jacobians {
            return sys;
        }
        let half_l = model.linear().scaled(0.5);
        let (my, hy) = (Arc::clone(&m), half_l.clone());
        let (mz, hz) = (m, half_l);
        sys.with_jacobians(
            Arc::new(move |_y, z| {
                my.assemble_q(z)
                    .and_then(|q| q.add_scaled(1.0, &hy))
                    .expect("dimension checked by the implicit step")
            }),
            Arc::new(move |y, _z| {
                mz.assemble_p(y)
                    .and_then(|p| p.add_scaled(1.0, &hz))
                    .expect("dimension checked by the implicit step")
            }),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn has_jacobians(&self) -> bool {
        self.dphi_dy.is_some() && self.dphi_dz.is_some()
    }

    pub fn phi(&self, y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        NsfdError::check_dim(self.dim, y.len())?;
        NsfdError::check_dim(self.dim, z.len())?;
        let out = (self.phi)(y, z);
        NsfdError::check_dim(self.dim, out.len())?;
        Ok(out)
    }

    pub fn f(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.phi(x, x)
    }

    pub(crate) fn dphi_dy(&self, y: &[f64], z: &[f64]) -> Option<RealMatrix> {
        self.dphi_dy.as_ref().map(|j| j(y, z))
    }

    pub(crate) fn dphi_dz(&self, y: &[f64], z: &[f64]) -> Option<RealMatrix> {
        self.dphi_dz.as_ref().map(|j| j(y, z))
    }
}

impl fmt::Debug for GeneralSplitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralSplitSystem")
            .field("dim", &self.dim)
            .field("has_jacobians", &self.has_jacobians())
            .field("domain", &self.domain)
            .finish()
    }
}
