use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("eigensolver did not converge: {reason} (max residual {max_residual:e})")]
    Convergence { reason: String, max_residual: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("trajectory (bath state {bath_state}, initial state {initial_state}): {source}")]
    Trajectory {
        bath_state: usize,
        initial_state: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
