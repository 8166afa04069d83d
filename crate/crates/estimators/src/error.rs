//! Error type shared by the regression and group-time estimators.

use smokeshift_core::YearMonth;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] smokeshift_core::Error),
    #[error("column {0:?} not found")]
    MissingColumn(String),
    #[error("column {name:?} has {got} rows, frame has {expected}")]
    ColumnLength {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("column {0:?} already exists")]
    DuplicateColumn(String),
    #[error("invalid design: {0}")]
    InvalidSpec(String),
    #[error("cluster-robust inference needs at least 2 clusters, found {0}")]
    TooFewClusters(usize),
    #[error("no treated observations in the sample")]
    EmptyTreated,
    #[error("{n_obs} observations cannot identify {n_params} parameters")]
    TooFewRows { n_obs: usize, n_params: usize },
    #[error("no observations for group {group} at period {time}")]
    MissingCell { group: YearMonth, time: YearMonth },
    #[error("group-time cell undefined: {0}")]
    InvalidCell(String),
    #[error("no group observed at event horizon {0}")]
    NoHorizon(i64),
    #[error("nothing to aggregate: {0}")]
    EmptyAggregation(String),
    #[error("multiplier bootstrap needs at least 99 replications, got {0}")]
    TooFewReps(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
