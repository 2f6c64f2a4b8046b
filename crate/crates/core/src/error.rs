use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pattern has no black pixel, bounding box undefined")]
    AllWhiteInput,

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("missing pattern for class {class}, variant {variant}")]
    MissingPattern { class: usize, variant: usize },

    #[error("malformed PBM file {file}: {reason}")]
    MalformedPbm { file: PathBuf, reason: String },

    #[error("inconsistent manifest: {0}")]
    InconsistentManifest(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("chromosome length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("crossover point {point} outside [0, {len}]")]
    PointOutOfRange { point: usize, len: usize },

    #[error("fitness {value} at index {index} is not strictly positive")]
    NonPositiveFitness { index: usize, value: f64 },

    #[error("chromosome is empty")]
    EmptyChromosome,

    #[error("being shapes differ: {0}")]
    ShapeMismatch(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed weight snapshot: {0}")]
    MalformedSnapshot(String),

    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
