use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid local dimension {0}: must be at least 2")]
    InvalidDimension(usize),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("no convergence after {iterations} restarts (best residual {best_residual:.3e})")]
    Convergence { iterations: usize, best_residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unsupported layout: {0}")]
    UnsupportedLayout(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Failure at a specific grid point of a sweep.
    #[error("at theta/pi = {theta_over_pi}: {source}")]
    AtTheta {
        theta_over_pi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// The error with any sweep-location wrapper removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTheta { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::ResourceLimit(_) => 3,
            Error::Convergence { .. } => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
