use crate::time::YearMonth;

/// Errors raised by calendar, geometry, assignment, and plume operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("month {0} outside 1..=12")]
    InvalidMonth(u32),
    #[error("cannot parse {0:?} as YYYY-MM")]
    ParseYearMonth(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("wind vector has zero magnitude; downwind direction undefined")]
    DegenerateWind,
    #[error("degenerate downwind geometry: {0}")]
    DegenerateGeometry(String),
    #[error("unit {unit_id} lies inside {n} SCA boundaries; SCA boundaries may not overlap")]
    ScaOverlap { unit_id: String, n: usize },
    #[error("no wind observations in the 24 months before {0}")]
    EmptyWindWindow(YearMonth),
    #[error("downwind distance {x} m outside the dispersion domain (x must be positive)")]
    DownwindDomain { x: f64 },
    #[error("schedule {sca_id}: operation {operation} precedes submission {submission}")]
    ScheduleOrder {
        sca_id: String,
        submission: YearMonth,
        operation: YearMonth,
    },
    #[error("concentration field has no strictly positive values")]
    EmptyField,
    #[error("no grid cells at or above the contour threshold")]
    EmptyContour,
    #[error("{0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
