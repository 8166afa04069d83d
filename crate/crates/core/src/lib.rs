//! Core domain types for smoke-control analysis: month arithmetic and
//! treatment phases, planar geometry on projected coordinates, treatment
//! assignment of stations and individuals to smoke control areas, and a
//! Gaussian plume model that turns wind history into downwind exposure
//! regions.
//!
//! Everything here is deterministic: no randomness, no global state, and
//! parallel evaluation (plume rasters) sums in a fixed order so results
//! are identical across thread counts.

pub mod downwind;
pub mod error;
pub mod geometry;
pub mod panel;
pub mod plume;
pub mod time;

pub use downwind::{
    assign_units, mean_wind, scaled_polygon_downwind, triangle_downwind, CbBoundary,
    ControlClass, UnitAssignment, WindVector, DOWNWIND_HALF_ANGLE_RAD, DOWNWIND_REACH_M,
};
pub use error::{Error, Result};
pub use geometry::{Point, Polygon};
pub use panel::{
    classify_phase, phase_of, IndividualRecord, OutcomeKind, Outcomes, PanelObservation,
    Pollutant, Sex, TreatmentSchedule,
};
pub use plume::{
    chimney_concentration, chimney_grid, concentration_at, contour_downwind, plume_field,
    sca_emission, sigma_yz, ConcentrationField, DispersionCoefficients, PlumeConfig,
};
pub use time::{
    conception_month, months_between, relative_event_time, trim_to_window, TreatmentPhase,
    YearMonth,
};
