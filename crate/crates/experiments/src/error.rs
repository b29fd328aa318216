use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] approxlab_core::Error),
    #[error("rate fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("rate fit needs positive values, got {value} at h = {h}")]
    NonPositive { h: f64, value: f64 },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid setting: {0}")]
    InvalidSetting(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
