//! Error type for the synthetic generators.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] smokeshift_core::Error),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("genotype count must be 0, 1, or 2: person {person}, snp {snp}, value {value}")]
    InvalidGenotype { person: usize, snp: usize, value: u8 },

    #[error("{weights} weights for {snps} snps")]
    WeightCount { snps: usize, weights: usize },

    #[error("polygenic scores have zero variance across persons")]
    ZeroVariance,
}

pub type Result<T> = std::result::Result<T, Error>;
