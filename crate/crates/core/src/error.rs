use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid allocation policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A user placed exactly on a base station has an infinite (or zero)
    /// interference factor.
    #[error("degenerate placement at ({x}, {y}): user coincides with a base station")]
    DegeneratePlacement { x: f64, y: f64 },

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("no open-access cutoff found for N up to {n_max}")]
    CutoffExceedsLimit { n_max: usize },

    #[error("open access never beneficial at N = {n}")]
    NeverBeneficial { n: usize },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

pub(crate) fn invalid_arg(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
