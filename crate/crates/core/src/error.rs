use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported dimension n={0} (supported: {1})")]
    UnsupportedDimension(usize, &'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("vanishing denominator at xi={xi:?}: {detail}")]
    VanishingDenominator { xi: Vec<f64>, detail: String },

    #[error("modulator violates |phi| <= 1: max sampled modulus {0}")]
    ModulatorBound(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("malformed GF01 data at byte {offset}: {message}")]
    Gf01 { offset: usize, message: String },

    #[error("descriptor error: {0}")]
    Descriptor(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
