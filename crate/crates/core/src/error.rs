use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulation, analytic and estimation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("gate on targets {targets:?} is not unitary (max |U^dag U - I| = {deviation:.3e})")]
    NonUnitary { targets: Vec<usize>, deviation: f64 },

    #[error("qubit index {index} out of range for a {n}-qubit register")]
    TargetOutOfRange { index: usize, n: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("index {index} out of range for ensemble of {size} members")]
    MemberOutOfRange { index: u64, size: u64 },

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("scheme {scheme} is undefined at bitstring {bitstring}: ideal probability is zero")]
    ZeroProbability { scheme: String, bitstring: String },

    #[error("missing ideal probability for bitstring {bitstring}")]
    MissingProbability { bitstring: String },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
