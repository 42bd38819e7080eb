use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("curvature profile produced a non-finite value at r = {radius}")]
    ProfileDomain { radius: f64 },

    #[error("warp function overflowed before R_max; integration reached r = {radius}")]
    Overflow { radius: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("argument {value} outside tabulated range [{min}, {max}]")]
    Range { value: f64, min: f64, max: f64 },

    #[error("construction failed on [{lo}, {hi}]: {reason}")]
    Construction { lo: f64, hi: f64, reason: String },

    #[error("Newton iteration did not converge after {iterations} iterations (last residual {last_residual:e})")]
    Convergence {
        iterations: usize,
        last_residual: f64,
        residual_history: Vec<f64>,
    },

    #[error("singular linearization at unknown {index} (ring {ring}, angle index {angle})")]
    Singular { index: usize, ring: usize, angle: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
