use thiserror::Error;

pub type Result<T> = std::result::Result<T, NsfdError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NsfdError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular matrix: pivot {pivot:e} in column {column} below threshold {threshold:e}")]
    Singular {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("solve matrix not strictly column diagonally dominant at column {column} (h = {h}); step size is above the dominance regime")]
    NotDominant { column: usize, h: f64 },

    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("pole: 1 - (h/2)*lambda vanishes (|.| = {modulus:e})")]
    Pole { modulus: f64 },

    #[error("invalid step size {h}: {reason}")]
    InvalidStep { h: f64, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("domain is not compact: {0}")]
    DomainNotCompact(String),

    #[error("domain is empty or degenerate: {0}")]
    EmptyDomain(String),

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<NsfdError>,
    },
}

impl NsfdError {
    /// True for failures of the numerics (solves, iterations) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            NsfdError::Singular { .. }
            | NsfdError::NotDominant { .. }
            | NsfdError::NoConvergence { .. }
            | NsfdError::EigenNoConvergence { .. }
            | NsfdError::Pole { .. } => true,
            NsfdError::StepFailed { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(NsfdError::DimensionMismatch { expected, got })
        }
    }
}
