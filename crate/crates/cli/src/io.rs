//! File interchange: the station-panel CSV and the boundary GeoJSON.
//! Ingest validates everything it types; emit writes the same shapes
//! back so ingest-then-emit round-trips are lossless.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use smokeshift_core::{
    CbBoundary, PanelObservation, Point, Pollutant, Polygon, TreatmentSchedule, YearMonth,
};

use crate::error::{Error, Result};
use crate::format::{fmt_f64, to_json_string};

pub const PANEL_HEADER: [&str; 8] = [
    "station_id",
    "cb_id",
    "easting_m",
    "northing_m",
    "year",
    "month",
    "pollutant",
    "concentration",
];

fn file_error(path: &Path, source: std::io::Error) -> Error {
    Error::File {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_error(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source: Box::new(source),
    }
}

fn row_error(path: &Path, line: u64, message: String) -> Error {
    Error::Row {
        path: path.to_path_buf(),
        line,
        message,
    }
}

/// Reads the station-month panel. Every row is typed and validated;
/// stations must keep one location and one borough throughout, and
/// (station, month, pollutant) keys must be unique.
pub fn ingest_panel(path: &Path) -> Result<Vec<PanelObservation>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if headers != PANEL_HEADER {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            expected: PANEL_HEADER.iter().map(|s| (*s).to_owned()).collect(),
            got: headers,
        });
    }

    let mut out = Vec::new();
    let mut seen: HashMap<(String, YearMonth, Pollutant), u64> = HashMap::new();
    let mut stations: HashMap<String, (Point, String, u64)> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, csv::Position::line);
        let field = |idx: usize| record.get(idx).unwrap_or("").trim();
        let float = |idx: usize| -> Result<f64> {
            field(idx).parse::<f64>().map_err(|_| {
                row_error(
                    path,
                    line,
                    format!("non-numeric {} {:?}", PANEL_HEADER[idx], field(idx)),
                )
            })
        };

        let station_id = field(0).to_owned();
        if station_id.is_empty() {
            return Err(row_error(path, line, "empty station_id".to_owned()));
        }
        let cb_id = field(1).to_owned();
        let easting = float(2)?;
        let northing = float(3)?;
        if !easting.is_finite() || !northing.is_finite() {
            return Err(row_error(path, line, "non-finite coordinates".to_owned()));
        }
        let year: i32 = field(4)
            .parse()
            .map_err(|_| row_error(path, line, format!("non-numeric year {:?}", field(4))))?;
        let month: u32 = field(5)
            .parse()
            .map_err(|_| row_error(path, line, format!("non-numeric month {:?}", field(5))))?;
        let time = YearMonth::new(year, month).map_err(|e| row_error(path, line, e.to_string()))?;
        let pollutant =
            Pollutant::parse(field(6)).map_err(|e| row_error(path, line, e.to_string()))?;
        let concentration = float(7)?;
        if !concentration.is_finite() || concentration < 0.0 {
            return Err(row_error(
                path,
                line,
                format!("negative or non-finite concentration {concentration}"),
            ));
        }

        if let Some(&earlier) = seen.get(&(station_id.clone(), time, pollutant)) {
            return Err(Error::DuplicateKey {
                path: path.to_path_buf(),
                line,
                earlier,
                station: station_id,
                time,
                pollutant,
            });
        }
        seen.insert((station_id.clone(), time, pollutant), line);

        let location = Point::new(easting, northing);
        match stations.get(&station_id) {
            None => {
                stations.insert(station_id.clone(), (location, cb_id.clone(), line));
            }
            Some((first_loc, first_cb, first_line)) => {
                if *first_loc != location || *first_cb != cb_id {
                    return Err(row_error(
                        path,
                        line,
                        format!(
                            "station {station_id} disagrees with line {first_line} \
                             on location or borough"
                        ),
                    ));
                }
            }
        }

        out.push(PanelObservation {
            station_id,
            cb_id,
            location,
            time,
            pollutant,
            concentration,
        });
    }
    Ok(out)
}

pub fn write_panel_csv(path: &Path, observations: &[PanelObservation]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    writer
        .write_record(PANEL_HEADER)
        .map_err(|e| csv_error(path, e))?;
    for obs in observations {
        writer
            .write_record([
                obs.station_id.as_str(),
                obs.cb_id.as_str(),
                &fmt_f64(obs.location.easting),
                &fmt_f64(obs.location.northing),
                &obs.time.year().to_string(),
                &obs.time.month().to_string(),
                obs.pollutant.as_str(),
                &fmt_f64(obs.concentration),
            ])
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| file_error(path, e))?;
    Ok(())
}

/// Distinct stations in first-appearance order, for spatial assignment.
/// Ingest already guarantees a single location per station.
pub fn panel_units(observations: &[PanelObservation]) -> Vec<(String, Point)> {
    let mut seen = HashMap::new();
    let mut units = Vec::new();
    for obs in observations {
        if seen.insert(obs.station_id.clone(), ()).is_none() {
            units.push((obs.station_id.clone(), obs.location));
        }
    }
    units
}

#[derive(Serialize, Deserialize)]
struct FeatureCollection {
    #[serde(rename = "type")]
    kind: String,
    features: Vec<Feature>,
}

#[derive(Serialize, Deserialize)]
struct Feature {
    #[serde(rename = "type")]
    kind: String,
    properties: Properties,
    geometry: Geometry,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(default)]
struct Properties {
    kind: Option<String>,
    id: Option<String>,
    cb_id: Option<String>,
    adoption: Option<String>,
    submission: Option<String>,
    operation: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct Geometry {
    #[serde(rename = "type")]
    kind: String,
    /// Rings of [easting, northing] pairs in projected meters; the first
    /// ring is the exterior.
    coordinates: Vec<Vec<[f64; 2]>>,
}

/// Boundary file contents: borough polygons, SCA schedules, and
/// non-fatal validation warnings (already logged).
#[derive(Clone, Debug)]
pub struct Boundaries {
    pub cbs: Vec<CbBoundary>,
    pub scas: Vec<TreatmentSchedule>,
    pub warnings: Vec<String>,
}

fn feature_error(path: &Path, index: usize, message: String) -> Error {
    Error::Feature {
        path: path.to_path_buf(),
        index,
        message,
    }
}

fn ring_points(ring: &[[f64; 2]]) -> Vec<Point> {
    ring.iter().map(|c| Point::new(c[0], c[1])).collect()
}

fn feature_polygon(path: &Path, index: usize, geometry: &Geometry) -> Result<Polygon> {
    if geometry.kind != "Polygon" {
        return Err(feature_error(
            path,
            index,
            format!("geometry type {:?} is not Polygon", geometry.kind),
        ));
    }
    let mut rings = geometry.coordinates.iter();
    let exterior = rings
        .next()
        .ok_or_else(|| feature_error(path, index, "polygon has no rings".to_owned()))?;
    let holes: Vec<Vec<Point>> = rings.map(|r| ring_points(r)).collect();
    Polygon::new(ring_points(exterior), holes)
        .map_err(|e| feature_error(path, index, e.to_string()))
}

fn required<'a>(
    path: &Path,
    index: usize,
    name: &str,
    value: &'a Option<String>,
) -> Result<&'a str> {
    value
        .as_deref()
        .ok_or_else(|| feature_error(path, index, format!("missing property {name:?}")))
}

fn parse_month(path: &Path, index: usize, name: &str, value: &str) -> Result<YearMonth> {
    value
        .parse()
        .map_err(|e: smokeshift_core::Error| feature_error(path, index, format!("{name}: {e}")))
}

/// Reads the boundary GeoJSON: a FeatureCollection of `cb` polygons with
/// an adoption flag and `sca` polygons with submission/operation months.
/// An SCA whose vertices stray outside its declared borough is a warning;
/// an operation month before submission is an error.
pub fn ingest_boundaries(path: &Path) -> Result<Boundaries> {
    let text = std::fs::read_to_string(path).map_err(|e| file_error(path, e))?;
    let collection: FeatureCollection = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if collection.kind != "FeatureCollection" {
        return Err(Error::Json {
            path: path.to_path_buf(),
            message: format!("root type {:?} is not FeatureCollection", collection.kind),
        });
    }

    let mut cbs: Vec<CbBoundary> = Vec::new();
    let mut scas: Vec<TreatmentSchedule> = Vec::new();
    for (index, feature) in collection.features.iter().enumerate() {
        if feature.kind != "Feature" {
            return Err(feature_error(
                path,
                index,
                format!("type {:?} is not Feature", feature.kind),
            ));
        }
        let boundary = feature_polygon(path, index, &feature.geometry)?;
        let props = &feature.properties;
        let id = required(path, index, "id", &props.id)?;
        match required(path, index, "kind", &props.kind)? {
            "cb" => {
                let adopting = match required(path, index, "adoption", &props.adoption)? {
                    "adopting" => true,
                    "non_adopting" => false,
                    other => {
                        return Err(feature_error(
                            path,
                            index,
                            format!("adoption {other:?} is neither adopting nor non_adopting"),
                        ))
                    }
                };
                if cbs.iter().any(|c| c.cb_id == id) {
                    return Err(feature_error(path, index, format!("duplicate cb id {id:?}")));
                }
                cbs.push(CbBoundary {
                    cb_id: id.to_owned(),
                    boundary,
                    adopting,
                });
            }
            "sca" => {
                let cb_id = required(path, index, "cb_id", &props.cb_id)?;
                let submission = parse_month(
                    path,
                    index,
                    "submission",
                    required(path, index, "submission", &props.submission)?,
                )?;
                let operation = parse_month(
                    path,
                    index,
                    "operation",
                    required(path, index, "operation", &props.operation)?,
                )?;
                if scas.iter().any(|s| s.sca_id == id) {
                    return Err(feature_error(
                        path,
                        index,
                        format!("duplicate sca id {id:?}"),
                    ));
                }
                let schedule =
                    TreatmentSchedule::new(id, cb_id, boundary, submission, operation)
                        .map_err(|e| feature_error(path, index, e.to_string()))?;
                scas.push(schedule);
            }
            other => {
                return Err(feature_error(
                    path,
                    index,
                    format!("kind {other:?} is neither cb nor sca"),
                ));
            }
        }
    }

    let mut warnings = Vec::new();
    for sca in &scas {
        let Some(cb) = cbs.iter().find(|c| c.cb_id == sca.cb_id) else {
            return Err(Error::Config(format!(
                "sca {:?} references unknown cb {:?}",
                sca.sca_id, sca.cb_id
            )));
        };
        // Vertex containment is a proxy for polygon containment; good
        // enough to flag digitization slips without exact clipping.
        let exterior = sca.boundary.exterior();
        if !exterior.iter().all(|p| cb.boundary.contains(*p)) {
            let message = format!(
                "sca {:?} is not contained in its declared cb {:?}",
                sca.sca_id, sca.cb_id
            );
            log::warn!("{message}");
            warnings.push(message);
        }
    }

    Ok(Boundaries {
        cbs,
        scas,
        warnings,
    })
}

fn polygon_rings(polygon: &Polygon) -> Vec<Vec<[f64; 2]>> {
    std::iter::once(polygon.exterior())
        .chain(polygon.holes().iter().map(Vec::as_slice))
        .map(|ring| ring.iter().map(|p| [p.easting, p.northing]).collect())
        .collect()
}

pub fn write_boundaries_geojson(
    path: &Path,
    cbs: &[CbBoundary],
    scas: &[TreatmentSchedule],
) -> Result<()> {
    let mut features = Vec::new();
    for cb in cbs {
        features.push(Feature {
            kind: "Feature".to_owned(),
            properties: Properties {
                kind: Some("cb".to_owned()),
                id: Some(cb.cb_id.clone()),
                adoption: Some(if cb.adopting { "adopting" } else { "non_adopting" }.to_owned()),
                ..Properties::default()
            },
            geometry: Geometry {
                kind: "Polygon".to_owned(),
                coordinates: polygon_rings(&cb.boundary),
            },
        });
    }
    for sca in scas {
        features.push(Feature {
            kind: "Feature".to_owned(),
            properties: Properties {
                kind: Some("sca".to_owned()),
                id: Some(sca.sca_id.clone()),
                cb_id: Some(sca.cb_id.clone()),
                submission: Some(sca.submission.to_string()),
                operation: Some(sca.operation.to_string()),
                adoption: None,
            },
            geometry: Geometry {
                kind: "Polygon".to_owned(),
                coordinates: polygon_rings(&sca.boundary),
            },
        });
    }
    let collection = FeatureCollection {
        kind: "FeatureCollection".to_owned(),
        features,
    };
    std::fs::write(path, to_json_string(&collection)).map_err(|e| file_error(path, e))
}

/// Writes a downwind contour as a one-feature GeoJSON collection. This is
/// a result artifact, not a boundary file; `ingest_boundaries` does not
/// read it back.
pub fn write_contour_geojson(path: &Path, sca_id: &str, contour: &Polygon) -> Result<()> {
    let collection = FeatureCollection {
        kind: "FeatureCollection".to_owned(),
        features: vec![Feature {
            kind: "Feature".to_owned(),
            properties: Properties {
                kind: Some("downwind".to_owned()),
                id: Some(sca_id.to_owned()),
                ..Properties::default()
            },
            geometry: Geometry {
                kind: "Polygon".to_owned(),
                coordinates: polygon_rings(contour),
            },
        }],
    };
    std::fs::write(path, to_json_string(&collection)).map_err(|e| file_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_ring(x0: f64, y0: f64, side: f64) -> Vec<[f64; 2]> {
        vec![
            [x0, y0],
            [x0 + side, y0],
            [x0 + side, y0 + side],
            [x0, y0 + side],
            [x0, y0],
        ]
    }

    fn write_lines(dir: &Path, name: &str, lines: &[&str]) -> std::path::PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, lines.join("\n")).unwrap();
        path
    }

    const HEADER: &str =
        "station_id,cb_id,easting_m,northing_m,year,month,pollutant,concentration";

    #[test]
    fn well_formed_three_row_file_yields_three_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_lines(
            dir.path(),
            "panel.csv",
            &[
                HEADER,
                "st_a,cb_1,100.0,200.0,1960,1,black_smoke,120.5",
                "st_a,cb_1,100.0,200.0,1960,2,black_smoke,118.0",
                "st_a,cb_1,100.0,200.0,1960,1,so2,95.0",
            ],
        );
        let records = ingest_panel(&path).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].station_id, "st_a");
        assert_eq!(records[0].time, YearMonth::new(1960, 1).unwrap());
        assert_eq!(records[2].pollutant, Pollutant::So2);
        assert_eq!(records[2].concentration, 95.0);
    }

    #[test]
    fn month_thirteen_is_rejected_naming_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_lines(
            dir.path(),
            "panel.csv",
            &[
                HEADER,
                "st_a,cb_1,100.0,200.0,1960,1,black_smoke,120.5",
                "st_a,cb_1,100.0,200.0,1960,13,black_smoke,118.0",
            ],
        );
        let err = ingest_panel(&path).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("13"), "{err}");
    }

    #[test]
    fn duplicate_key_error_names_both_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_lines(
            dir.path(),
            "panel.csv",
            &[
                HEADER,
                "st_a,cb_1,100.0,200.0,1960,1,black_smoke,120.5",
                "st_b,cb_1,300.0,200.0,1960,1,black_smoke,110.0",
                "st_a,cb_1,100.0,200.0,1960,1,black_smoke,121.0",
            ],
        );
        match ingest_panel(&path).unwrap_err() {
            Error::DuplicateKey { line, earlier, .. } => {
                assert_eq!((line, earlier), (4, 2));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn negative_concentration_and_bad_numbers_are_row_errors() {
        let dir = tempfile::tempdir().unwrap();
        for (row, needle) in [
            ("st_a,cb_1,100.0,200.0,1960,1,black_smoke,-3.0", "negative"),
            ("st_a,cb_1,100.0,200.0,1960,1,black_smoke,abc", "non-numeric"),
            ("st_a,cb_1,oops,200.0,1960,1,black_smoke,3.0", "non-numeric"),
            ("st_a,cb_1,100.0,200.0,1960,1,smog,3.0", "pollutant"),
        ] {
            let path = write_lines(dir.path(), "panel.csv", &[HEADER, row]);
            let err = ingest_panel(&path).unwrap_err().to_string();
            assert!(err.contains("line 2"), "{err}");
            assert!(err.contains(needle), "{err}");
        }
    }

    #[test]
    fn wrong_header_is_a_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_lines(
            dir.path(),
            "panel.csv",
            &["station,year,month", "st_a,1960,1"],
        );
        assert!(matches!(
            ingest_panel(&path).unwrap_err(),
            Error::Schema { .. }
        ));
    }

    #[test]
    fn moved_station_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_lines(
            dir.path(),
            "panel.csv",
            &[
                HEADER,
                "st_a,cb_1,100.0,200.0,1960,1,black_smoke,120.5",
                "st_a,cb_1,999.0,200.0,1960,2,black_smoke,118.0",
            ],
        );
        let err = ingest_panel(&path).unwrap_err().to_string();
        assert!(err.contains("disagrees with line 2"), "{err}");
    }

    #[test]
    fn panel_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let observations = vec![
            PanelObservation {
                station_id: "st_a".to_owned(),
                cb_id: "cb_1".to_owned(),
                location: Point::new(1234.5678901234567, 0.1),
                time: YearMonth::new(1959, 12).unwrap(),
                pollutant: Pollutant::BlackSmoke,
                concentration: 2.0 / 3.0,
            },
            PanelObservation {
                station_id: "st_a".to_owned(),
                cb_id: "cb_1".to_owned(),
                location: Point::new(1234.5678901234567, 0.1),
                time: YearMonth::new(1960, 1).unwrap(),
                pollutant: Pollutant::So2,
                concentration: 1.0e-7,
            },
        ];
        let path = dir.path().join("panel.csv");
        write_panel_csv(&path, &observations).unwrap();
        assert_eq!(ingest_panel(&path).unwrap(), observations);
    }

    fn feature_json(
        kind: &str,
        id: &str,
        extra: &str,
        ring: &[[f64; 2]],
    ) -> String {
        let coords: Vec<String> = ring.iter().map(|c| format!("[{},{}]", c[0], c[1])).collect();
        format!(
            r#"{{"type":"Feature","properties":{{"kind":"{kind}","id":"{id}"{extra}}},"geometry":{{"type":"Polygon","coordinates":[[{}]]}}}}"#,
            coords.join(",")
        )
    }

    fn collection_json(features: &[String]) -> String {
        format!(
            r#"{{"type":"FeatureCollection","features":[{}]}}"#,
            features.join(",")
        )
    }

    #[test]
    fn one_cb_and_one_sca_yield_one_schedule() {
        let dir = tempfile::tempdir().unwrap();
        let json = collection_json(&[
            feature_json("cb", "cb_1", r#","adoption":"adopting""#, &square_ring(0.0, 0.0, 10_000.0)),
            feature_json(
                "sca",
                "s_1",
                r#","cb_id":"cb_1","submission":"1958-06","operation":"1959-10""#,
                &square_ring(2_000.0, 2_000.0, 5_000.0),
            ),
        ]);
        let path = dir.path().join("b.geojson");
        std::fs::write(&path, json).unwrap();
        let boundaries = ingest_boundaries(&path).unwrap();
        assert_eq!(boundaries.cbs.len(), 1);
        assert_eq!(boundaries.scas.len(), 1);
        assert!(boundaries.warnings.is_empty());
        let sca = &boundaries.scas[0];
        assert_eq!(sca.sca_id, "s_1");
        assert_eq!(sca.submission, YearMonth::new(1958, 6).unwrap());
        assert_eq!(sca.operation, YearMonth::new(1959, 10).unwrap());
    }

    #[test]
    fn operation_before_submission_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let json = collection_json(&[
            feature_json("cb", "cb_1", r#","adoption":"adopting""#, &square_ring(0.0, 0.0, 10_000.0)),
            feature_json(
                "sca",
                "s_1",
                r#","cb_id":"cb_1","submission":"1959-10","operation":"1958-06""#,
                &square_ring(2_000.0, 2_000.0, 5_000.0),
            ),
        ]);
        let path = dir.path().join("b.geojson");
        std::fs::write(&path, json).unwrap();
        let err = ingest_boundaries(&path).unwrap_err().to_string();
        assert!(err.contains("operation"), "{err}");
    }

    #[test]
    fn unclosed_ring_is_a_geometry_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut ring = square_ring(0.0, 0.0, 10_000.0);
        ring.pop();
        let json = collection_json(&[feature_json(
            "cb",
            "cb_1",
            r#","adoption":"adopting""#,
            &ring,
        )]);
        let path = dir.path().join("b.geojson");
        std::fs::write(&path, json).unwrap();
        let err = ingest_boundaries(&path).unwrap_err().to_string();
        assert!(err.contains("feature 0"), "{err}");
    }

    #[test]
    fn missing_property_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let json = collection_json(&[feature_json(
            "sca",
            "s_1",
            r#","cb_id":"cb_1","submission":"1958-06""#,
            &square_ring(0.0, 0.0, 1_000.0),
        )]);
        let path = dir.path().join("b.geojson");
        std::fs::write(&path, json).unwrap();
        let err = ingest_boundaries(&path).unwrap_err().to_string();
        assert!(err.contains("operation"), "{err}");
    }

    #[test]
    fn stray_sca_warns_but_does_not_fail() {
        let dir = tempfile::tempdir().unwrap();
        let json = collection_json(&[
            feature_json("cb", "cb_1", r#","adoption":"adopting""#, &square_ring(0.0, 0.0, 10_000.0)),
            feature_json(
                "sca",
                "s_1",
                r#","cb_id":"cb_1","submission":"1958-06","operation":"1959-10""#,
                &square_ring(8_000.0, 8_000.0, 5_000.0),
            ),
        ]);
        let path = dir.path().join("b.geojson");
        std::fs::write(&path, json).unwrap();
        let boundaries = ingest_boundaries(&path).unwrap();
        assert_eq!(boundaries.warnings.len(), 1);
        assert!(boundaries.warnings[0].contains("s_1"));
    }

    #[test]
    fn boundaries_round_trip_through_geojson() {
        let dir = tempfile::tempdir().unwrap();
        let cb = CbBoundary {
            cb_id: "cb_1".to_owned(),
            boundary: Polygon::new(ring_points(&square_ring(0.0, 0.0, 10_000.0)), vec![]).unwrap(),
            adopting: true,
        };
        let sca = TreatmentSchedule::new(
            "s_1",
            "cb_1",
            Polygon::new(ring_points(&square_ring(2_500.0, 2_500.0, 5_000.0)), vec![]).unwrap(),
            YearMonth::new(1958, 6).unwrap(),
            YearMonth::new(1959, 10).unwrap(),
        )
        .unwrap();
        let path = dir.path().join("b.geojson");
        write_boundaries_geojson(&path, &[cb.clone()], &[sca.clone()]).unwrap();
        let back = ingest_boundaries(&path).unwrap();
        assert_eq!(back.cbs, vec![cb]);
        assert_eq!(back.scas, vec![sca]);
    }
}
