//! CLI error type. File-level problems carry the offending path, row and
//! feature problems carry 1-based positions so messages point at the
//! exact input line.

use std::path::PathBuf;

use smokeshift_core::{Pollutant, YearMonth};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] smokeshift_core::Error),

    #[error(transparent)]
    Estimators(#[from] smokeshift_estimators::Error),

    #[error(transparent)]
    Sim(#[from] smokeshift_sim::Error),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Json { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        source: Box<csv::Error>,
    },

    #[error("{path}: expected header {expected:?}, got {got:?}")]
    Schema {
        path: PathBuf,
        expected: Vec<String>,
        got: Vec<String>,
    },

    #[error("{path} line {line}: {message}")]
    Row {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error(
        "{path} line {line} duplicates line {earlier}: ({station}, {time}, {pollutant})",
        pollutant = .pollutant.as_str()
    )]
    DuplicateKey {
        path: PathBuf,
        line: u64,
        earlier: u64,
        station: String,
        time: YearMonth,
        pollutant: Pollutant,
    },

    #[error("{path} feature {index}: {message}")]
    Feature {
        path: PathBuf,
        index: usize,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
