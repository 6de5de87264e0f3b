use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid population: {0}")]
    InvalidPopulation(String),

    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    #[error("record for individual {0} is censored by the observation horizon; period estimation needs fully observed durations")]
    Censored(usize),

    #[error("no finite starting point found after {0} prior draws")]
    NoFiniteStart(usize),

    #[error("optimizer did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NonConvergence { iterations: usize, gradient_norm: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::InconsistentData(msg.into())
    }

    pub(crate) fn population(msg: impl Into<String>) -> Self {
        Error::InvalidPopulation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
