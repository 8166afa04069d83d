//! Command implementations. Each command ingests what it needs, runs the
//! corresponding library pipeline, and writes results plus a manifest
//! into the output directory. All output is bit-stable: rerunning with
//! the same inputs, config, and seed reproduces every artifact byte for
//! byte (only the manifest's wall time moves).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use smokeshift_core::{
    assign_units, chimney_grid, contour_downwind, mean_wind, months_between, plume_field,
    sca_emission, scaled_polygon_downwind, triangle_downwind, DispersionCoefficients,
    IndividualRecord, OutcomeKind, PanelObservation, Pollutant, Polygon, TreatmentSchedule,
    UnitAssignment, WindVector, YearMonth,
};
use smokeshift_estimators::{
    att_surface_in, cross_section_ols, estimate, individual_frame, multiplier_bootstrap_in,
    outcome_column, station_frame, EstimateTable, Frame, GtPanel, RegressionInput,
    StationSchedules, TreatmentTerms,
};
use smokeshift_sim::{
    generate_individuals, generate_panel, generate_rollout, generate_weather, WeatherSeries,
};

use crate::config::{
    DownwindConfig, DownwindMethod, EstimateConfig, RunConfig, TreatmentAnchor,
};
use crate::error::{Error, Result};
use crate::format::{fmt_f64, read_json, write_json};
use crate::io::{
    ingest_boundaries, ingest_panel, panel_units, write_boundaries_geojson, write_panel_csv,
    Boundaries,
};
use crate::manifest::ManifestBuilder;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Simulate,
    Assign,
    Plume,
    EventStudy,
    Did,
    Gta,
    DiagnoseTiming,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Simulate => "simulate",
            CommandKind::Assign => "assign",
            CommandKind::Plume => "plume",
            CommandKind::EventStudy => "event-study",
            CommandKind::Did => "did",
            CommandKind::Gta => "gta",
            CommandKind::DiagnoseTiming => "diagnose-timing",
        }
    }
}

/// Runs one command against a fully resolved config. `bin_width`
/// carries the `--bin-width` flag and only applies to `event-study`.
pub fn dispatch(command: CommandKind, config: &RunConfig, bin_width: Option<u32>) -> Result<()> {
    let out = &config.output_dir;
    std::fs::create_dir_all(out).map_err(|source| Error::File {
        path: out.clone(),
        source,
    })?;
    match command {
        CommandKind::Simulate => cmd_simulate(config),
        CommandKind::Assign => cmd_assign(config),
        CommandKind::Plume => cmd_plume(config),
        CommandKind::EventStudy => cmd_estimate(CommandKind::EventStudy, config, bin_width),
        CommandKind::Did => cmd_estimate(CommandKind::Did, config, None),
        CommandKind::Gta => cmd_gta(config),
        CommandKind::DiagnoseTiming => cmd_diagnose_timing(config),
    }
}

fn block<'a, T>(block: &'a Option<T>, name: &str) -> Result<&'a T> {
    block
        .as_ref()
        .ok_or_else(|| Error::Config(format!("missing {name:?} block in config")))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

struct CsvOut {
    writer: csv::Writer<std::fs::File>,
    path: PathBuf,
}

impl CsvOut {
    fn create(path: PathBuf, header: &[&str]) -> Result<Self> {
        let mut writer = csv::Writer::from_path(&path).map_err(|source| Error::Csv {
            path: path.clone(),
            source: Box::new(source),
        })?;
        writer.write_record(header).map_err(|source| Error::Csv {
            path: path.clone(),
            source: Box::new(source),
        })?;
        Ok(Self { writer, path })
    }

    fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(|source| Error::Csv {
            path: self.path.clone(),
            source: Box::new(source),
        })
    }

    fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(|source| Error::File {
            path: self.path.clone(),
            source,
        })
    }
}

fn cmd_simulate(config: &RunConfig) -> Result<()> {
    let mut sim_cfg = *block(&config.simulate, "simulate")?;
    // The global seed is the one source of randomness for a run.
    sim_cfg.seed = config.seed;
    let mut manifest = ManifestBuilder::new("simulate", config);
    let out = &config.output_dir;

    let rollout = generate_rollout(&sim_cfg)?;
    let weather = generate_weather(&sim_cfg);
    let panel = generate_panel(&sim_cfg, &rollout);
    let cohort = generate_individuals(&sim_cfg, &rollout, &weather)?;

    write_panel_csv(&out.join("panel.csv"), &panel.observations)?;
    manifest.output("panel.csv");
    manifest.rows("panel", panel.observations.len());

    let cbs = rollout.cb_boundaries();
    let scas = rollout.schedules();
    write_boundaries_geojson(&out.join("boundaries.geojson"), &cbs, &scas)?;
    manifest.output("boundaries.geojson");
    manifest.rows("cbs", cbs.len());
    manifest.rows("scas", scas.len());

    write_json(&out.join("weather.json"), &weather)?;
    manifest.output("weather.json");
    manifest.rows("weather_series", weather.len());

    write_json(&out.join("individuals.json"), &cohort.records)?;
    manifest.output("individuals.json");
    manifest.rows("individuals", cohort.records.len());

    write_json(&out.join("truth.json"), &cohort.truth)?;
    manifest.output("truth.json");

    manifest.write(out)?;
    Ok(())
}

fn read_weather(path: &Path) -> Result<Vec<WeatherSeries>> {
    read_json(path)
}

fn series_for<'a>(weather: &'a [WeatherSeries], cb_id: &str) -> Result<&'a WeatherSeries> {
    weather
        .iter()
        .find(|w| w.cb_id == cb_id)
        .ok_or_else(|| Error::Config(format!("no weather series for cb {cb_id:?}")))
}

/// Emission scale used when a downwind contour is built from the plume
/// model; the contour thresholds on a fraction of the field maximum, so
/// the scale cancels and any positive constant gives the same region.
const DOWNWIND_POPULATION_SCALE: f64 = 100_000.0;

fn build_downwind(
    downwind: Option<&DownwindConfig>,
    boundaries: &Boundaries,
) -> Result<BTreeMap<String, Polygon>> {
    let Some(cfg) = downwind else {
        return Ok(BTreeMap::new());
    };
    let weather = read_weather(&cfg.weather)?;
    let mut polys = BTreeMap::new();
    for sca in &boundaries.scas {
        let series = series_for(&weather, &sca.cb_id)?;
        let wind = mean_wind(&series.wind_series(), sca.submission)?;
        let poly = match cfg.method {
            DownwindMethod::Triangle => triangle_downwind(sca, wind)?,
            DownwindMethod::ScaledPolygon => scaled_polygon_downwind(sca, wind)?,
            DownwindMethod::Plume => {
                let cb = boundaries
                    .cbs
                    .iter()
                    .find(|c| c.cb_id == sca.cb_id)
                    .expect("ingest validated the cb reference");
                let field = plume_field(
                    sca,
                    wind,
                    &cfg.plume,
                    &DispersionCoefficients::default(),
                    cb.boundary.area(),
                    DOWNWIND_POPULATION_SCALE,
                )?;
                contour_downwind(&field, &sca.boundary, &cfg.plume)?
            }
        };
        polys.insert(sca.sca_id.clone(), poly);
    }
    Ok(polys)
}

fn assignments_for(
    observations: &[PanelObservation],
    boundaries: &Boundaries,
    downwind: Option<&DownwindConfig>,
) -> Result<Vec<UnitAssignment>> {
    let units = panel_units(observations);
    let polys = build_downwind(downwind, boundaries)?;
    Ok(assign_units(
        &units,
        &boundaries.cbs,
        &boundaries.scas,
        &polys,
    )?)
}

/// Per-station schedule maps for the regression frame. A station inside
/// an SCA follows its own schedule; a downwind station follows the
/// earliest-submitted SCA it is downwind of.
fn station_schedules(
    assignments: &[UnitAssignment],
    scas: &[TreatmentSchedule],
) -> StationSchedules {
    let dates: BTreeMap<&str, (YearMonth, YearMonth)> = scas
        .iter()
        .map(|s| (s.sca_id.as_str(), (s.submission, s.operation)))
        .collect();
    let mut schedules = StationSchedules::default();
    for a in assignments {
        if let Some(sca_id) = &a.inside_sca {
            schedules
                .inside
                .insert(a.unit_id.clone(), dates[sca_id.as_str()]);
        }
        let earliest = a
            .downwind_of
            .iter()
            .map(|id| (dates[id.as_str()], id))
            .min_by_key(|((submission, _), id)| (*submission, (*id).clone()));
        if let Some(((submission, operation), _)) = earliest {
            schedules
                .downwind
                .insert(a.unit_id.clone(), (submission, operation));
        }
    }
    schedules
}

fn cmd_assign(config: &RunConfig) -> Result<()> {
    let a = block(&config.assign, "assign")?;
    let mut manifest = ManifestBuilder::new("assign", config);
    let out = &config.output_dir;

    let observations = ingest_panel(&a.panel)?;
    manifest.input(&a.panel)?;
    let boundaries = ingest_boundaries(&a.boundaries)?;
    manifest.input(&a.boundaries)?;
    for w in &boundaries.warnings {
        manifest.warning(w);
    }
    if let Some(d) = &a.downwind {
        manifest.input(&d.weather)?;
    }

    let assignments = assignments_for(&observations, &boundaries, a.downwind.as_ref())?;

    let mut csv = CsvOut::create(
        out.join("assignments.csv"),
        &["unit_id", "cb_id", "inside_sca", "downwind_of", "control_class"],
    )?;
    for row in &assignments {
        let downwind: Vec<&str> = row.downwind_of.iter().map(String::as_str).collect();
        let downwind = downwind.join(";");
        csv.row([
            row.unit_id.as_str(),
            row.cb_id.as_deref().unwrap_or(""),
            row.inside_sca.as_deref().unwrap_or(""),
            downwind.as_str(),
            row.control_class.as_str(),
        ])?;
    }
    csv.finish()?;
    manifest.output("assignments.csv");

    write_json(&out.join("assignments.json"), &assignments)?;
    manifest.output("assignments.json");
    manifest.rows("assignments", assignments.len());

    manifest.write(out)?;
    Ok(())
}

#[derive(Serialize)]
struct PlumeSummary {
    sca_id: String,
    cb_id: String,
    wind_east: f64,
    wind_north: f64,
    wind_speed: f64,
    n_chimneys: usize,
    emission_per_chimney: f64,
    grid_nx: usize,
    grid_ny: usize,
    grid_resolution_m: f64,
    max_concentration: f64,
    contour_threshold_fraction: f64,
    contour_area_m2: f64,
}

fn cmd_plume(config: &RunConfig) -> Result<()> {
    let p = block(&config.plume, "plume")?;
    let mut manifest = ManifestBuilder::new("plume", config);
    let out = &config.output_dir;

    let boundaries = ingest_boundaries(&p.boundaries)?;
    manifest.input(&p.boundaries)?;
    for w in &boundaries.warnings {
        manifest.warning(w);
    }
    let sca = boundaries
        .scas
        .iter()
        .find(|s| s.sca_id == p.sca_id)
        .ok_or_else(|| Error::Config(format!("no sca {:?} in boundaries", p.sca_id)))?;
    let cb = boundaries
        .cbs
        .iter()
        .find(|c| c.cb_id == sca.cb_id)
        .expect("ingest validated the cb reference");

    let wind = match (p.wind_east, p.wind_north, &p.weather) {
        (Some(u), Some(v), _) => WindVector::new(u, v),
        (None, None, Some(path)) => {
            let weather = read_weather(path)?;
            manifest.input(path)?;
            mean_wind(&series_for(&weather, &sca.cb_id)?.wind_series(), sca.submission)?
        }
        _ => {
            return Err(Error::Config(
                "give wind_east and wind_north together, or a weather file".to_owned(),
            ))
        }
    };

    let coeffs = DispersionCoefficients::default();
    let field = plume_field(
        sca,
        wind,
        &p.config,
        &coeffs,
        cb.boundary.area(),
        p.cb_population_1951,
    )?;
    let contour = contour_downwind(&field, &sca.boundary, &p.config)?;

    let mut csv = CsvOut::create(
        out.join("field.csv"),
        &["easting_m", "northing_m", "concentration"],
    )?;
    for iy in 0..field.ny() {
        for ix in 0..field.nx() {
            let center = field.cell_center(ix, iy);
            csv.row([
                fmt_f64(center.easting),
                fmt_f64(center.northing),
                fmt_f64(field.get(ix, iy)),
            ])?;
        }
    }
    csv.finish()?;
    manifest.output("field.csv");
    manifest.rows("field_cells", field.nx() * field.ny());

    crate::io::write_contour_geojson(&out.join("contour.geojson"), &sca.sca_id, &contour)?;
    manifest.output("contour.geojson");

    let chimneys = chimney_grid(&sca.boundary, p.config.chimney_spacing_m);
    let total = sca_emission(sca, cb.boundary.area(), p.cb_population_1951);
    let summary = PlumeSummary {
        sca_id: sca.sca_id.clone(),
        cb_id: sca.cb_id.clone(),
        wind_east: wind.u_east,
        wind_north: wind.v_north,
        wind_speed: wind.speed(),
        n_chimneys: chimneys.len(),
        emission_per_chimney: total / chimneys.len() as f64,
        grid_nx: field.nx(),
        grid_ny: field.ny(),
        grid_resolution_m: field.resolution_m(),
        max_concentration: field.max_value(),
        contour_threshold_fraction: p.config.contour_threshold_fraction,
        contour_area_m2: contour.area(),
    };
    write_json(&out.join("plume.json"), &summary)?;
    manifest.output("plume.json");

    manifest.write(out)?;
    Ok(())
}

fn outcome_kind(column: &str) -> Result<OutcomeKind> {
    OutcomeKind::ALL
        .into_iter()
        .find(|kind| outcome_column(*kind) == column)
        .ok_or_else(|| {
            let valid: Vec<&str> = OutcomeKind::ALL.iter().map(|k| outcome_column(*k)).collect();
            Error::Config(format!(
                "individual outcome {column:?} is not one of {valid:?}"
            ))
        })
}

fn estimate_input(
    e: &EstimateConfig,
    manifest: &mut ManifestBuilder,
) -> Result<(RegressionInput, Boundaries)> {
    let boundaries = ingest_boundaries(&e.boundaries)?;
    manifest.input(&e.boundaries)?;
    for w in &boundaries.warnings {
        manifest.warning(w);
    }
    let input = match (&e.panel, &e.individuals) {
        (Some(panel_path), None) => {
            let observations = ingest_panel(panel_path)?;
            manifest.input(panel_path)?;
            if let Some(d) = &e.downwind {
                manifest.input(&d.weather)?;
            }
            let pollutant = Pollutant::parse(&e.pollutant)?;
            let assignments =
                assignments_for(&observations, &boundaries, e.downwind.as_ref())?;
            let schedules = station_schedules(&assignments, &boundaries.scas);
            station_frame(&observations, &schedules, pollutant)?
        }
        (None, Some(individuals_path)) => {
            if e.downwind.is_some() {
                return Err(Error::Config(
                    "downwind classification applies to station panels only".to_owned(),
                ));
            }
            let records: Vec<IndividualRecord> = read_json(individuals_path)?;
            manifest.input(individuals_path)?;
            let kind = outcome_kind(&e.spec.outcome)?;
            individual_frame(&records, &boundaries.cbs, &boundaries.scas, kind)?
        }
        _ => {
            return Err(Error::Config(
                "give exactly one of panel or individuals".to_owned(),
            ))
        }
    };
    manifest.rows("input", input.frame.n_rows());
    let input = input.trim_event_window(e.trim_months);
    manifest.rows("after_trim", input.frame.n_rows());
    Ok((input, boundaries))
}

/// Event-study rows in plot order: numeric bin index parsed from the
/// `tau_*` term names.
fn tau_rows(table: &EstimateTable) -> Vec<(i64, &smokeshift_estimators::EstimateRow)> {
    let mut rows: Vec<(i64, _)> = table
        .rows
        .iter()
        .filter_map(|r| {
            r.term
                .strip_prefix("tau_")
                .and_then(|s| s.parse::<i64>().ok())
                .map(|tau| (tau, r))
        })
        .collect();
    rows.sort_by_key(|(tau, _)| *tau);
    rows
}

fn cmd_estimate(kind: CommandKind, config: &RunConfig, bin_width: Option<u32>) -> Result<()> {
    let (e, name) = match kind {
        CommandKind::EventStudy => (block(&config.event_study, "event_study")?, "event-study"),
        CommandKind::Did => (block(&config.did, "did")?, "did"),
        _ => unreachable!("cmd_estimate only handles event-study and did"),
    };
    let mut manifest = ManifestBuilder::new(name, config);
    let out = &config.output_dir;

    let mut spec = e.spec.clone();
    if let Some(width) = bin_width {
        match &mut spec.treatment_terms {
            TreatmentTerms::EventStudy {
                bin_width_months, ..
            } => *bin_width_months = width,
            _ => {
                return Err(Error::Config(
                    "--bin-width needs event_study treatment terms".to_owned(),
                ))
            }
        }
    }

    let (input, _) = estimate_input(e, &mut manifest)?;
    let table = estimate(&input, &spec)?;

    write_json(&out.join("estimates.json"), &table)?;
    manifest.output("estimates.json");
    write_text(&out.join("estimates.txt"), &table.render())?;
    manifest.output("estimates.txt");
    manifest.rows("n_obs", table.n_obs);
    manifest.rows("n_clusters", table.n_clusters);

    if kind == CommandKind::EventStudy {
        let mut csv = CsvOut::create(
            out.join("coefficients.csv"),
            &["tau", "coef", "ci_lo", "ci_hi"],
        )?;
        let rows = tau_rows(&table);
        let n_rows = rows.len();
        for (tau, row) in rows {
            csv.row([
                tau.to_string(),
                fmt_f64(row.coef),
                fmt_f64(row.ci95.0),
                fmt_f64(row.ci95.1),
            ])?;
        }
        csv.finish()?;
        manifest.output("coefficients.csv");
        manifest.rows("coefficients", n_rows);
    }

    manifest.write(out)?;
    Ok(())
}

fn cmd_gta(config: &RunConfig) -> Result<()> {
    let g = block(&config.gta, "gta")?;
    let mut manifest = ManifestBuilder::new("gta", config);
    let out = &config.output_dir;

    let observations = ingest_panel(&g.panel)?;
    manifest.input(&g.panel)?;
    let boundaries = ingest_boundaries(&g.boundaries)?;
    manifest.input(&g.boundaries)?;
    for w in &boundaries.warnings {
        manifest.warning(w);
    }

    let pollutant = Pollutant::parse(&g.pollutant)?;
    let records: Vec<(String, YearMonth, f64)> = observations
        .iter()
        .filter(|o| o.pollutant == pollutant)
        .map(|o| (o.station_id.clone(), o.time, o.concentration))
        .collect();

    let assignments = assignments_for(&observations, &boundaries, None)?;
    let dates: BTreeMap<&str, &TreatmentSchedule> = boundaries
        .scas
        .iter()
        .map(|s| (s.sca_id.as_str(), s))
        .collect();
    let mut groups: BTreeMap<String, YearMonth> = BTreeMap::new();
    for a in &assignments {
        if let Some(sca_id) = &a.inside_sca {
            let schedule = dates[sca_id.as_str()];
            let anchor = match g.anchor {
                TreatmentAnchor::Submission => schedule.submission,
                TreatmentAnchor::Operation => schedule.operation,
            };
            groups.insert(a.unit_id.clone(), anchor);
        }
    }

    let panel = GtPanel::from_records(&records, &groups)?;
    let surface = att_surface_in(&panel, g.comparison)?;
    let result = multiplier_bootstrap_in(&panel, g.comparison, g.reps, config.seed)?;

    let mut csv = CsvOut::create(
        out.join("att_surface.csv"),
        &["group", "time", "event_time", "att", "se", "n_treated", "n_control"],
    )?;
    for cell in &surface {
        csv.row([
            cell.group.to_string(),
            cell.time.to_string(),
            months_between(cell.group, cell.time).to_string(),
            fmt_f64(cell.att),
            fmt_f64(cell.se),
            cell.n_treated.to_string(),
            cell.n_control.to_string(),
        ])?;
    }
    csv.finish()?;
    manifest.output("att_surface.csv");
    manifest.rows("att_cells", surface.len());

    let mut csv = CsvOut::create(
        out.join("dynamic.csv"),
        &["event_time", "estimate", "se", "ci_lo", "ci_hi", "uniform_lo", "uniform_hi"],
    )?;
    for cell in &result.dynamic {
        csv.row([
            cell.event_time.to_string(),
            fmt_f64(cell.estimate),
            fmt_f64(cell.se),
            fmt_f64(cell.ci95.0),
            fmt_f64(cell.ci95.1),
            fmt_f64(cell.uniform_ci95.0),
            fmt_f64(cell.uniform_ci95.1),
        ])?;
    }
    csv.finish()?;
    manifest.output("dynamic.csv");
    manifest.rows("dynamic_steps", result.dynamic.len());

    write_json(&out.join("gta.json"), &result)?;
    manifest.output("gta.json");

    manifest.write(out)?;
    Ok(())
}

#[derive(Serialize)]
struct TimingDiagnostics {
    timing_on_pre_pollution: EstimateTable,
    ever_inside_gap: EstimateTable,
    earliest_submission: YearMonth,
}

fn cmd_diagnose_timing(config: &RunConfig) -> Result<()> {
    let d = block(&config.diagnose_timing, "diagnose_timing")?;
    let mut manifest = ManifestBuilder::new("diagnose-timing", config);
    let out = &config.output_dir;

    let observations = ingest_panel(&d.panel)?;
    manifest.input(&d.panel)?;
    let boundaries = ingest_boundaries(&d.boundaries)?;
    manifest.input(&d.boundaries)?;
    for w in &boundaries.warnings {
        manifest.warning(w);
    }

    let pollutant = Pollutant::parse(&d.pollutant)?;
    let earliest = boundaries
        .scas
        .iter()
        .map(|s| s.submission)
        .min()
        .ok_or_else(|| Error::Config("no SCAs in boundaries".to_owned()))?;
    let submission_of: BTreeMap<&str, YearMonth> = boundaries
        .scas
        .iter()
        .map(|s| (s.cb_id.as_str(), s.submission))
        .collect();

    let assignments = assignments_for(&observations, &boundaries, None)?;
    let inside: BTreeMap<&str, bool> = assignments
        .iter()
        .map(|a| (a.unit_id.as_str(), a.inside_sca.is_some()))
        .collect();

    // Station pre-treatment means: strictly before the own-borough
    // submission when there is one, otherwise before the earliest
    // submission anywhere (a common pre era for never-adopters).
    struct StationPre {
        station_id: String,
        cb_id: String,
        pre_mean: f64,
        ever_inside: bool,
        adopting_cb: bool,
    }
    let mut sums: BTreeMap<String, (String, f64, usize)> = BTreeMap::new();
    for obs in &observations {
        if obs.pollutant != pollutant {
            continue;
        }
        let cutoff = submission_of
            .get(obs.cb_id.as_str())
            .copied()
            .unwrap_or(earliest);
        if obs.time >= cutoff {
            continue;
        }
        let entry = sums
            .entry(obs.station_id.clone())
            .or_insert_with(|| (obs.cb_id.clone(), 0.0, 0));
        entry.1 += obs.concentration;
        entry.2 += 1;
    }
    let stations: Vec<StationPre> = sums
        .into_iter()
        .map(|(station_id, (cb_id, sum, n))| StationPre {
            ever_inside: inside.get(station_id.as_str()).copied().unwrap_or(false),
            adopting_cb: submission_of.contains_key(cb_id.as_str()),
            station_id,
            cb_id,
            pre_mean: sum / n as f64,
        })
        .collect();

    let mut csv = CsvOut::create(
        out.join("station_pre_means.csv"),
        &["station_id", "cb_id", "pre_mean", "ever_inside"],
    )?;
    for s in &stations {
        csv.row([
            s.station_id.clone(),
            s.cb_id.clone(),
            fmt_f64(s.pre_mean),
            u8::from(s.ever_inside).to_string(),
        ])?;
    }
    csv.finish()?;
    manifest.output("station_pre_means.csv");
    manifest.rows("stations_with_pre_period", stations.len());

    // Borough-level: months from the first submission anywhere to the
    // borough's own, regressed on the borough's pre-period pollution.
    let mut cb_rows: Vec<(String, f64, f64)> = Vec::new();
    for (cb_id, submission) in &submission_of {
        let pre: Vec<f64> = stations
            .iter()
            .filter(|s| s.cb_id == *cb_id)
            .map(|s| s.pre_mean)
            .collect();
        if pre.is_empty() {
            continue;
        }
        cb_rows.push((
            (*cb_id).to_owned(),
            months_between(earliest, *submission) as f64,
            pre.iter().sum::<f64>() / pre.len() as f64,
        ));
    }
    let mut frame = Frame::new(cb_rows.len());
    frame.add_float(
        "timing_months",
        cb_rows.iter().map(|r| r.1).collect(),
    )?;
    frame.add_float(
        "pre_pollution",
        cb_rows.iter().map(|r| r.2).collect(),
    )?;
    let timing_table = cross_section_ols(
        &frame,
        "timing_months",
        &["pre_pollution".to_owned()],
        &[],
        None,
    )?;

    let mut csv = CsvOut::create(
        out.join("cb_timing.csv"),
        &["cb_id", "timing_months", "pre_pollution"],
    )?;
    for (cb_id, timing, pre) in &cb_rows {
        csv.row([cb_id.clone(), fmt_f64(*timing), fmt_f64(*pre)])?;
    }
    csv.finish()?;
    manifest.output("cb_timing.csv");
    manifest.rows("adopting_cbs", cb_rows.len());

    // Within adopting boroughs: do later-inside stations already differ
    // before treatment?
    let gap_rows: Vec<&StationPre> = stations.iter().filter(|s| s.adopting_cb).collect();
    let mut frame = Frame::new(gap_rows.len());
    frame.add_float("pre_mean", gap_rows.iter().map(|s| s.pre_mean).collect())?;
    frame.add_float(
        "ever_inside",
        gap_rows.iter().map(|s| f64::from(s.ever_inside)).collect(),
    )?;
    frame.add_cat("cb", gap_rows.iter().map(|s| s.cb_id.clone()).collect())?;
    let gap_table = cross_section_ols(
        &frame,
        "pre_mean",
        &["ever_inside".to_owned()],
        &[],
        Some("cb"),
    )?;

    let diagnostics = TimingDiagnostics {
        timing_on_pre_pollution: timing_table,
        ever_inside_gap: gap_table,
        earliest_submission: earliest,
    };
    write_json(&out.join("timing.json"), &diagnostics)?;
    manifest.output("timing.json");

    manifest.write(out)?;
    Ok(())
}
