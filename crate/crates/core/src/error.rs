use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point that must lie in the open disc does not.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The flow left the closed disc by more than the allowed slack.
    #[error("integrator escape at t = {t}: |z| = {modulus}")]
    IntegratorEscape { t: f64, modulus: f64 },

    #[error("integrator failed: {0}")]
    Integrator(String),

    /// Two independent estimates of the same quantity disagree.
    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("internal consistency: {0}")]
    InternalConsistency(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not a boundary regular fixed point: {0}")]
    NotBrfp(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
