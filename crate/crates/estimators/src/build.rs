//! Adapters from domain records to regression inputs: station panels keyed
//! by observation month and birth cohorts keyed by conception month, each
//! paired with per-row treatment context for the design builders.

use std::collections::BTreeMap;

use smokeshift_core::{
    conception_month, CbBoundary, IndividualRecord, OutcomeKind, PanelObservation, Pollutant,
    TreatmentSchedule, YearMonth,
};

use crate::error::{Error, Result};
use crate::estimate::RegressionInput;
use crate::frame::Frame;
use crate::design::TreatmentContext;

/// Float column name used for each outcome. Birth weight is converted to
/// grams so effect sizes read in the units they are usually quoted in.
pub fn outcome_column(kind: OutcomeKind) -> &'static str {
    match kind {
        OutcomeKind::BirthWeight => "birth_weight_g",
        OutcomeKind::Height => "height_cm",
        OutcomeKind::YearsEducation => "years_education",
        OutcomeKind::FluidIntelligence => "fluid_intelligence",
    }
}

/// Schedule windows, keyed by station id, for stations inside an SCA
/// (`inside`) or downwind of one (`downwind`, earliest upwind submission).
#[derive(Clone, Debug, Default)]
pub struct StationSchedules {
    pub inside: BTreeMap<String, (YearMonth, YearMonth)>,
    pub downwind: BTreeMap<String, (YearMonth, YearMonth)>,
}

/// One row per observation of `pollutant`: float `concentration`, cats
/// `station` / `cb` / `year_month`, clock = observation month.
pub fn station_frame(
    observations: &[PanelObservation],
    schedules: &StationSchedules,
    pollutant: Pollutant,
) -> Result<RegressionInput> {
    let rows: Vec<&PanelObservation> = observations
        .iter()
        .filter(|o| o.pollutant == pollutant)
        .collect();
    if rows.is_empty() {
        return Err(Error::InvalidSpec(format!(
            "no {} observations",
            pollutant.as_str()
        )));
    }
    let mut frame = Frame::new(rows.len());
    frame.add_float(
        "concentration",
        rows.iter().map(|o| o.concentration).collect(),
    )?;
    frame.add_cat("station", rows.iter().map(|o| o.station_id.clone()).collect())?;
    frame.add_cat("cb", rows.iter().map(|o| o.cb_id.clone()).collect())?;
    frame.add_cat(
        "year_month",
        rows.iter().map(|o| o.time.to_string()).collect(),
    )?;
    let contexts = rows
        .iter()
        .map(|o| TreatmentContext {
            clock: o.time,
            inside: schedules.inside.get(&o.station_id).copied(),
            downwind: schedules.downwind.get(&o.station_id).copied(),
        })
        .collect();
    RegressionInput::new(frame, contexts)
}

fn locate<'a>(point: smokeshift_core::Point, cbs: &'a [CbBoundary]) -> Option<&'a CbBoundary> {
    cbs.iter().find(|cb| cb.boundary.contains(point))
}

/// One row per person: the outcome column for `kind` (NaN when missing),
/// cats `cb` / `cb_inside` / `birth_ym`, covariate floats (`male`,
/// `other_ethnicity`, `low_ses`, `mean_exposure`, `pc1`..), and `pgs` for
/// this outcome. The treatment clock is the conception month, so phases
/// follow exposure in utero rather than at delivery.
pub fn individual_frame(
    records: &[IndividualRecord],
    cbs: &[CbBoundary],
    schedules: &[TreatmentSchedule],
    kind: OutcomeKind,
) -> Result<RegressionInput> {
    if records.is_empty() {
        return Err(Error::InvalidSpec("no individual records".to_owned()));
    }
    let n_pcs = records[0].principal_components.len();
    let n = records.len();
    let mut y = Vec::with_capacity(n);
    let mut cb_col = Vec::with_capacity(n);
    let mut cb_inside = Vec::with_capacity(n);
    let mut birth_ym = Vec::with_capacity(n);
    let mut male = Vec::with_capacity(n);
    let mut other_eth = Vec::with_capacity(n);
    let mut low_ses = Vec::with_capacity(n);
    let mut exposure = Vec::with_capacity(n);
    let mut pgs = Vec::with_capacity(n);
    let mut pcs: Vec<Vec<f64>> = vec![Vec::with_capacity(n); n_pcs];
    let mut contexts = Vec::with_capacity(n);

    for r in records {
        let cb = locate(r.birth_location, cbs).ok_or_else(|| {
            Error::InvalidSpec(format!(
                "{}: birth location outside every county borough",
                r.person_id
            ))
        })?;
        if r.principal_components.len() != n_pcs {
            return Err(Error::ColumnLength {
                name: format!("principal_components of {}", r.person_id),
                expected: n_pcs,
                got: r.principal_components.len(),
            });
        }
        let inside = schedules
            .iter()
            .find(|s| s.boundary.contains(r.birth_location));
        let value = r.outcomes.get(kind).unwrap_or(f64::NAN);
        y.push(if kind == OutcomeKind::BirthWeight {
            value * 1000.0
        } else {
            value
        });
        cb_col.push(cb.cb_id.clone());
        cb_inside.push(format!(
            "{}_{}",
            cb.cb_id,
            if inside.is_some() { "in" } else { "out" }
        ));
        birth_ym.push(r.birth.to_string());
        male.push(if r.sex == smokeshift_core::Sex::M { 1.0 } else { 0.0 });
        other_eth.push(if r.ethnicity == "white_british" { 0.0 } else { 1.0 });
        low_ses.push(if r.low_ses_area { 1.0 } else { 0.0 });
        exposure.push(if r.weather_exposure.is_empty() {
            f64::NAN
        } else {
            r.weather_exposure.iter().sum::<f64>() / r.weather_exposure.len() as f64
        });
        pgs.push(r.pgs.get(&kind).copied().unwrap_or(f64::NAN));
        for (j, col) in pcs.iter_mut().enumerate() {
            col.push(r.principal_components[j]);
        }
        contexts.push(TreatmentContext {
            clock: conception_month(r.birth),
            inside: inside.map(|s| (s.submission, s.operation)),
            downwind: None,
        });
    }

    let mut frame = Frame::new(n);
    frame.add_float(outcome_column(kind), y)?;
    frame.add_cat("cb", cb_col)?;
    frame.add_cat("cb_inside", cb_inside)?;
    frame.add_cat("birth_ym", birth_ym)?;
    frame.add_float("male", male)?;
    frame.add_float("other_ethnicity", other_eth)?;
    frame.add_float("low_ses", low_ses)?;
    frame.add_float("mean_exposure", exposure)?;
    frame.add_float("pgs", pgs)?;
    for (j, col) in pcs.into_iter().enumerate() {
        frame.add_float(&format!("pc{}", j + 1), col)?;
    }
    RegressionInput::new(frame, contexts)
}
