use thiserror::Error;

/// Errors produced by signal, filter-bank, network, and verification code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("length {n} is not divisible by pooling factor {s}")]
    NotDivisible { n: usize, s: usize },

    #[error("unknown atom label {0}")]
    UnknownLabel(String),

    #[error("filter support {support} exceeds signal length {n}")]
    FilterSupport { support: usize, n: usize },

    #[error("module sequence is not admissible: {0}")]
    Inadmissible(String),

    #[error("layer {0} does not contribute to the feature vector")]
    NonContributingLayer(usize),

    #[error("interval endpoint {0} lies on the sampling grid")]
    EndpointOnGrid(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
