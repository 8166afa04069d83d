//! Estimators for the smokeshift pipeline: treatment-term construction
//! from per-row schedules, high-dimensional fixed-effects least squares
//! with cluster-robust inference, plain cross-section OLS for the
//! adoption-timing diagnostics, and group-time average treatment
//! effects with a multiplier bootstrap.
//!
//! Everything is deterministic for a given input and seed; the only
//! parallelism is across independent columns and bootstrap reps, each of
//! which carries its own derived RNG stream.

pub mod bootstrap;
pub mod build;
pub mod cross_section;
pub mod demean;
pub mod design;
pub mod error;
pub mod estimate;
pub mod frame;
pub mod gta;
pub mod ols;
pub mod vcov;

pub use bootstrap::{
    multiplier_bootstrap, multiplier_bootstrap_in, BootstrapResult, DynamicCell,
    DEFAULT_BOOTSTRAP_REPS, MIN_BOOTSTRAP_REPS,
};
pub use build::{individual_frame, outcome_column, station_frame, StationSchedules};
pub use cross_section::cross_section_ols;
pub use demean::{demean, DemeanInfo, FeDim, TrendDim};
pub use design::{
    build_event_dummies, build_static_terms, event_window_mask, DesignColumn, DesignSpec,
    EventDummy, Interactions, TreatmentContext, TreatmentTerms,
};
pub use error::{Error, Result};
pub use estimate::{estimate, EstimateRow, EstimateTable, RegressionInput, CI95_Z};
pub use frame::{recode, Frame, Recoded};
pub use gta::{
    aggregate_dynamic, aggregate_overall, att_gt, att_gt_in, att_surface, att_surface_in,
    AggregatedAtt, AggregationKind, ComparisonGroup, GroupTimeAtt, GtPanel,
};
pub use ols::{ols, OlsFit};
pub use vcov::{cluster_vcov, hc1_vcov};
