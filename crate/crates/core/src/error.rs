use thiserror::Error;

/// Errors raised by the transport-coefficient pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    NonConvergence { subdivisions: usize, estimate: f64, error: f64 },

    #[error("recurrence mismatch at theta[{k},{j}]: recurrence {recurrence:e} vs quadrature {direct:e} (rel gap {gap:e})")]
    RecurrenceMismatch {
        k: usize,
        j: usize,
        recurrence: f64,
        direct: f64,
        gap: f64,
    },

    #[error("singular system: {context} (magnitude {magnitude:e})")]
    SingularSystem { context: String, magnitude: f64 },

    #[error("theta table lacks theta[{k},{j}]")]
    MissingTheta { k: usize, j: usize },

    #[error("identity violated: {name} residual {residual:e}")]
    IdentityViolation { name: String, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
