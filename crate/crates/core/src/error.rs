//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// More than half of the input lines failed to parse, which almost always
    /// means the field mapping does not match the file.
    #[error("{malformed} of {total} lines malformed in {path}: wrong schema?")]
    BadFormat {
        path: PathBuf,
        malformed: usize,
        total: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no quotes for cell")]
    EmptyCell,

    #[error("KL divergence undefined: q has zero mass where p does not and epsilon = 0")]
    DivergenceUndefined,

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("need at least {needed} outlets for bias comparison, found {found}")]
    NotEnoughOutlets { needed: usize, found: usize },

    #[error("sample too small for t-test: need at least 2 observations per side")]
    SampleTooSmall,

    #[error("correlation undefined: zero variance in {0}")]
    CorrelationUndefined(&'static str),

    #[error("insufficient years for SCV: {country} has {found} surveyed years, need at least 3")]
    InsufficientYears { country: String, found: usize },

    #[error("need at least 3 distinct surveyed countries, found {0}")]
    NotEnoughCountries(usize),

    #[error("pass-through scorer found {0} records without a sentiment score")]
    MissingScores(usize),

    #[error("target country {0} already has survey ground truth")]
    TargetSurveyed(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
