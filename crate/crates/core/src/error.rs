use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter fell outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A curvature profile violated positivity or its declared flags.
    #[error("invalid curvature profile: {0}")]
    InvalidProfile(String),

    /// The ODE integrator could not reach the requested accuracy.
    #[error("integrator failure: {0}")]
    IntegratorFailure(String),

    /// An operation was called outside its stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The operation needs a constant-curvature manifold.
    #[error("unsupported manifold: {0}")]
    UnsupportedManifold(String),

    /// A truncated integral showed no sign of convergence.
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// The interaction profile fails the growth condition required for a
    /// ground state, so the search is refused instead of run.
    #[error("refused: {0}")]
    Refused(String),

    /// Malformed or inconsistent run configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
