use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FinslerError {
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("origin is not an interior point of the body (min support {0:.3e})")]
    OriginNotInterior(f64),

    #[error("frame is not orthonormal (defect {0:.3e})")]
    NonOrthonormalFrame(f64),

    #[error("positivity violated: F({x:?}, {v:?}) = {value:.6e}")]
    PositivityViolation { x: Vec<f64>, v: Vec<f64>, value: f64 },

    #[error("point {0:?} lies outside the field domain")]
    OutsideDomain(Vec<f64>),

    #[error("density is not admissible: {0}")]
    InadmissibleDensity(String),

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        solver: String,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("dual norm refinement did not converge (best {best:.12e}, gap bound {gap:.3e})")]
    DualNonConvergence { best: f64, gap: f64 },

    #[error("field is not of the required kind: {0}")]
    WrongFamily(String),

    #[error("transversality margin violated at ({s1:.4}, {s2:.4}): angle {angle:.3e} rad")]
    NotTransversal { s1: f64, s2: f64, angle: f64 },

    #[error("one-form is not closed: loop residual {residual:.3e} exceeds {budget:.3e}")]
    NotClosed { residual: f64, budget: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

impl FinslerError {
    /// True for solver failures that exhausted their iteration budget.
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            FinslerError::NonConvergence { .. } | FinslerError::DualNonConvergence { .. }
        )
    }
}

impl From<serde_json::Error> for FinslerError {
    fn from(e: serde_json::Error) -> Self {
        FinslerError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FinslerError>;

pub(crate) fn check_finite(value: f64, context: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(FinslerError::NonFinite(context.to_string()))
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(FinslerError::UnsupportedDimension(dim))
    }
}
