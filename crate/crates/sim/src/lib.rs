//! Synthetic data with known answers: a staggered smoke-control rollout
//! over square county boroughs, monthly wind and temperature series,
//! station pollution panels, and birth cohorts with genotypes. Every
//! injected effect size lives in the returned ground truth so estimator
//! tests can check recovery instead of eyeballing output.
//!
//! Determinism contract: one master seed, one independent ChaCha stream
//! per (domain, unit) pair. Regenerating any piece with the same config
//! reproduces it bit for bit, and enabling one process (say missingness)
//! never shifts the draws of another.

pub mod config;
pub mod error;
pub mod individuals;
pub mod panel;
pub mod pgs;
pub mod rng;
pub mod rollout;
pub mod weather;

pub use config::{
    GapDistribution, GroundTruth, PgsInteractions, SimConfig, WeatherModel,
};
pub use error::{Error, Result};
pub use individuals::{generate_individuals, Cohort, EXPOSURE_MONTHS, INDIVIDUAL_MAF};
pub use panel::{
    generate_panel, SimulatedStation, StationPanel, BLACK_SMOKE_BASE, SO2_BASE,
};
pub use pgs::{aggregate_polygenic_score, random_genotypes, GenotypeMatrix};
pub use rng::{stream, sub_seed, Domain};
pub use rollout::{
    adopting_count, generate_rollout, square, CbSite, Rollout, CB_SIDE_M, SCA_SIDE_M,
};
pub use weather::{generate_weather, weather_window, WeatherSeries};
