//! Panel record types: treatment schedules, pollution measurements, and
//! birth cohort records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::time::{TreatmentPhase, YearMonth};

/// An SCA boundary with its milestone dates: `submission` starts the
/// adjustment phase, `operation` starts the post phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreatmentSchedule {
    pub sca_id: String,
    pub cb_id: String,
    pub boundary: Polygon,
    pub submission: YearMonth,
    pub operation: YearMonth,
}

impl TreatmentSchedule {
    pub fn new(
        sca_id: impl Into<String>,
        cb_id: impl Into<String>,
        boundary: Polygon,
        submission: YearMonth,
        operation: YearMonth,
    ) -> Result<Self> {
        let sca_id = sca_id.into();
        if operation < submission {
            return Err(Error::ScheduleOrder {
                sca_id,
                submission,
                operation,
            });
        }
        Ok(Self {
            sca_id,
            cb_id: cb_id.into(),
            boundary,
            submission,
            operation,
        })
    }
}

/// Phase of `t` under a schedule. Post is checked first so that a schedule
/// with operation equal to submission has no adjustment phase.
pub fn classify_phase(t: YearMonth, sched: &TreatmentSchedule) -> TreatmentPhase {
    phase_of(t, sched.submission, sched.operation)
}

/// Phase of `t` relative to a (submission, operation) date pair, for
/// callers that carry schedule dates without the boundary geometry.
pub fn phase_of(t: YearMonth, submission: YearMonth, operation: YearMonth) -> TreatmentPhase {
    if t >= operation {
        TreatmentPhase::Post
    } else if t >= submission {
        TreatmentPhase::Adjustment
    } else {
        TreatmentPhase::Pre
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pollutant {
    BlackSmoke,
    So2,
}

impl Pollutant {
    pub fn as_str(self) -> &'static str {
        match self {
            Pollutant::BlackSmoke => "black_smoke",
            Pollutant::So2 => "so2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "black_smoke" => Ok(Pollutant::BlackSmoke),
            "so2" => Ok(Pollutant::So2),
            other => Err(Error::Validation(format!("unknown pollutant {other:?}"))),
        }
    }
}

/// One pollutant measurement at a station in a month.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PanelObservation {
    pub station_id: String,
    pub cb_id: String,
    pub location: Point,
    pub time: YearMonth,
    pub pollutant: Pollutant,
    /// mcg/m³, non-negative.
    pub concentration: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sex {
    M,
    F,
}

/// Outcome dimensions measured on individuals; also the keys of the
/// polygenic-score map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    BirthWeight,
    Height,
    YearsEducation,
    FluidIntelligence,
}

impl OutcomeKind {
    pub const ALL: [OutcomeKind; 4] = [
        OutcomeKind::BirthWeight,
        OutcomeKind::Height,
        OutcomeKind::YearsEducation,
        OutcomeKind::FluidIntelligence,
    ];
}

/// Per-person outcomes; each is optional because survey coverage differs
/// across outcomes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Outcomes {
    pub birth_weight_kg: Option<f64>,
    pub height_cm: Option<f64>,
    pub years_education: Option<f64>,
    pub fluid_intelligence: Option<f64>,
}

impl Outcomes {
    pub fn get(&self, kind: OutcomeKind) -> Option<f64> {
        match kind {
            OutcomeKind::BirthWeight => self.birth_weight_kg,
            OutcomeKind::Height => self.height_cm,
            OutcomeKind::YearsEducation => self.years_education,
            OutcomeKind::FluidIntelligence => self.fluid_intelligence,
        }
    }
}

/// One person: birth place/date, outcomes, covariates, polygenic scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndividualRecord {
    pub person_id: String,
    pub birth_location: Point,
    pub birth: YearMonth,
    pub sex: Sex,
    pub ethnicity: String,
    pub outcomes: Outcomes,
    /// Monthly weather exposure from conception through age two.
    pub weather_exposure: Vec<f64>,
    /// Standardized polygenic score per outcome.
    pub pgs: BTreeMap<OutcomeKind, f64>,
    pub principal_components: Vec<f64>,
    pub low_ses_area: bool,
}
