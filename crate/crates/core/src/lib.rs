//! Structure-preserving integration of mass-action systems.
//!
//! The central object is the second-order, time-reversible nonlocal scheme
//!
//! ```text
//! (x_{k+1} - x_k) / h = ½ (φ(x_{k+1}, x_k) + φ(x_k, x_{k+1}))
//! ```
//!
//! for a vector field written in split form `f(x) = φ(x, x)`. For mass-action
//! models it reduces to one linear solve per step, which this crate performs
//! together with:
//!
//! * a safe step bound `h̄` below which both solve matrices are strictly column
//!   diagonally dominant on the whole domain ([`integrator::step_bound`]);
//! * continuous and discrete tangent-condition checks and empirical
//!   invariance audits on convex polyhedral domains ([`invariance`]);
//! * equilibrium finding, eigenvalue-map stability reports and observed-order
//!   estimation ([`analysis`]);
//! * the built-in logistic, SI and host-vector models ([`library`]).
//!
//! ```
//! use nsfd_core::{integrate, make_logistic};
//!
//! let model = make_logistic(1.0, 1.0).unwrap();
//! let traj = integrate(&model, &[0.5], 0.1, 10).unwrap();
//! let exact = 1.0 / (1.0 + (-1.0f64).exp());
//! assert!((traj.final_state()[0] - exact).abs() < 2e-4);
//! ```

pub mod analysis;
pub mod error;
pub mod integrator;
pub mod invariance;
pub mod library;
pub mod linalg;
pub mod model;

pub use analysis::{
    find_equilibria, mu_of_lambda, observed_order, observed_order_with, rk4_reference,
    stability_report, EquilibriumResult, EquilibriumStatus, OrderEstimate, StabilityReport,
    StabilityRow,
};
pub use error::{NsfdError, Result};
pub use integrator::{
    integrate, integrate_with, reversibility_residual, step_backward, step_bound, step_bound_with,
    step_forward, step_implicit_general, NewtonOptions, Scheme, StepBoundOptions, StepBoundReport,
    Trajectory,
};
pub use invariance::{
    continuous_tangent, discrete_tangent, invariance_audit, reversibility_audit, sample_boundary,
    AuditOptions, AuditReport, BoundarySample, FacetFilter, ReversibilityReport, TangentOptions,
    TangentReport,
};
pub use library::{builtin, make_host_vector, make_logistic, make_si, HostVectorParameters};
pub use linalg::{ComplexScalar, RealMatrix};
pub use model::{
    BilinearTerm, Domain, FacetKind, GeneralSplitSystem, LinearConstraint, MassActionModel,
    ValidationReport,
};
