use thiserror::Error;

/// Errors raised by the form calculus, the reduction maps, the physical
/// systems and the integrators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("derivative of top form undefined (degree {degree} on a {dim}-dimensional grid)")]
    TopFormDerivative { degree: usize, dim: usize },

    #[error("degree overflow: {left} + {right} exceeds dimension {dim}")]
    DegreeOverflow { left: usize, right: usize, dim: usize },

    #[error("degree mismatch in {context}: expected {expected}, found {found}")]
    DegreeMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("forms live on different grids")]
    GridMismatch,

    #[error("invalid component data: {0}")]
    InvalidComponents(String),

    #[error("density must be at least {threshold:e}, found {min:e}")]
    NonPositiveDensity { min: f64, threshold: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in integrator stage {stage}")]
    NonFinite { stage: usize },

    #[error("implicit solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("step {step} failed at t = {t}: {source}")]
    StepFailed {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
