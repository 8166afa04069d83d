//! Downwind classification: prevailing-wind averaging, the two geometric
//! downwind constructions (isosceles triangle and scaled polygon), and the
//! assignment of units to SCA / CB / downwind classes.
//!
//! Both constructions share the same fixed reach (5 km) and half-angle
//! (22.5°). Degenerate inputs (zero wind, crosswind-flat boundaries,
//! self-intersecting quadrilaterals) raise errors instead of guessing.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::panel::TreatmentSchedule;
use crate::time::{months_between, YearMonth};

/// Distance from the anchor points (or apex) to the far end of a downwind
/// region, in meters.
pub const DOWNWIND_REACH_M: f64 = 5_000.0;

/// Half the vertex angle of the downwind constructions, in radians.
pub const DOWNWIND_HALF_ANGLE_RAD: f64 = 22.5 * std::f64::consts::PI / 180.0;

/// Monthly-mean wind as east/north components in m/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindVector {
    pub u_east: f64,
    pub v_north: f64,
}

impl WindVector {
    pub fn new(u_east: f64, v_north: f64) -> Self {
        Self { u_east, v_north }
    }

    pub fn speed(self) -> f64 {
        self.u_east.hypot(self.v_north)
    }

    /// True for the exactly-zero vector, whose direction is undefined.
    pub fn is_degenerate(self) -> bool {
        self.speed() == 0.0
    }

    /// Unit direction (east, north).
    pub fn direction(self) -> Result<(f64, f64)> {
        let speed = self.speed();
        if speed == 0.0 || !speed.is_finite() {
            return Err(Error::DegenerateWind);
        }
        Ok((self.u_east / speed, self.v_north / speed))
    }
}

/// Component-wise mean wind over the 24 months before `submission`
/// (months submission-24 through submission-1, inclusive).
pub fn mean_wind(
    series: &[(YearMonth, WindVector)],
    submission: YearMonth,
) -> Result<WindVector> {
    let mut sum_u = 0.0;
    let mut sum_v = 0.0;
    let mut n = 0usize;
    for &(t, w) in series {
        let lead = months_between(t, submission);
        if (1..=24).contains(&lead) {
            sum_u += w.u_east;
            sum_v += w.v_north;
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptyWindWindow(submission));
    }
    Ok(WindVector::new(sum_u / n as f64, sum_v / n as f64))
}

/// Isosceles downwind triangle: apex at the SCA centroid, symmetry axis
/// along the wind, height [`DOWNWIND_REACH_M`], vertex angle 45°.
pub fn triangle_downwind(sca: &TreatmentSchedule, wind: WindVector) -> Result<Polygon> {
    let (we, wn) = wind.direction()?;
    let apex = sca.boundary.centroid()?;
    let base_center = apex.offset(DOWNWIND_REACH_M * we, DOWNWIND_REACH_M * wn);
    let half_width = DOWNWIND_REACH_M * DOWNWIND_HALF_ANGLE_RAD.tan();
    // Left-hand normal of the wind direction.
    let (le, ln) = (-wn, we);
    let ring = vec![
        apex,
        base_center.offset(-half_width * le, -half_width * ln),
        base_center.offset(half_width * le, half_width * ln),
        apex,
    ];
    Polygon::new(ring, vec![])
}

/// Scaled-polygon downwind region: project the boundary onto the axis
/// orthogonal to the wind, take the two extreme vertices as anchors, and
/// from each draw a [`DOWNWIND_REACH_M`] segment at ±22.5° off the wind;
/// the quadrilateral closes back across the SCA.
///
/// Errors when the boundary has no crosswind extent or when the resulting
/// quadrilateral self-intersects (anchors separated too far along the
/// wind), the known failure modes of this construction.
pub fn scaled_polygon_downwind(sca: &TreatmentSchedule, wind: WindVector) -> Result<Polygon> {
    let (we, wn) = wind.direction()?;
    let (le, ln) = (-wn, we);
    // Skip the repeated closing vertex so first-in-ring-order tie-breaking
    // is well defined.
    let vertices = &sca.boundary.exterior()[..sca.boundary.exterior().len() - 1];
    let crosswind = |p: &Point| p.easting * le + p.northing * ln;
    let mut left = vertices[0];
    let mut right = vertices[0];
    for v in &vertices[1..] {
        if crosswind(v) > crosswind(&left) {
            left = *v;
        }
        if crosswind(v) < crosswind(&right) {
            right = *v;
        }
    }
    let extent = crosswind(&left) - crosswind(&right);
    let (bb_min, bb_max) = sca.boundary.bounding_box();
    let scale = (bb_max.easting - bb_min.easting).hypot(bb_max.northing - bb_min.northing);
    if extent <= 1e-9 * scale.max(1.0) {
        return Err(Error::DegenerateGeometry(format!(
            "boundary of {} has no crosswind extent under this wind",
            sca.sca_id
        )));
    }
    let (sin, cos) = DOWNWIND_HALF_ANGLE_RAD.sin_cos();
    // Wind direction rotated by +22.5° (toward the left anchor's side) and
    // by -22.5° (toward the right anchor's side).
    let dir_left = (we * cos - wn * sin, we * sin + wn * cos);
    let dir_right = (we * cos + wn * sin, -we * sin + wn * cos);
    let end_left = left.offset(DOWNWIND_REACH_M * dir_left.0, DOWNWIND_REACH_M * dir_left.1);
    let end_right = right.offset(
        DOWNWIND_REACH_M * dir_right.0,
        DOWNWIND_REACH_M * dir_right.1,
    );
    Polygon::new(vec![right, end_right, end_left, left, right], vec![]).map_err(|e| {
        Error::DegenerateGeometry(format!(
            "downwind quadrilateral of {} is invalid: {e}",
            sca.sca_id
        ))
    })
}

/// A county borough boundary and whether it ever adopted an SCA.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CbBoundary {
    pub cb_id: String,
    pub boundary: Polygon,
    pub adopting: bool,
}

/// Which comparison group a unit belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlClass {
    InsideSca,
    OutsideScaInAdoptingCb,
    NonAdoptingCb,
    OutsideCbNeverAdopter,
}

impl ControlClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ControlClass::InsideSca => "inside_sca",
            ControlClass::OutsideScaInAdoptingCb => "outside_sca_in_adopting_cb",
            ControlClass::NonAdoptingCb => "non_adopting_cb",
            ControlClass::OutsideCbNeverAdopter => "outside_cb_never_adopter",
        }
    }
}

/// Spatial classification of one unit (station or person).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitAssignment {
    pub unit_id: String,
    pub cb_id: Option<String>,
    pub inside_sca: Option<String>,
    /// SCAs whose downwind region covers the unit while the unit is outside
    /// that SCA's own boundary.
    pub downwind_of: BTreeSet<String>,
    pub control_class: ControlClass,
}

/// Classifies units against SCA boundaries, CB boundaries, and downwind
/// regions. A point inside two or more SCA boundaries is an ingest error.
pub fn assign_units(
    units: &[(String, Point)],
    cbs: &[CbBoundary],
    scas: &[TreatmentSchedule],
    downwind_polys: &BTreeMap<String, Polygon>,
) -> Result<Vec<UnitAssignment>> {
    units
        .iter()
        .map(|(unit_id, point)| {
            let mut inside: Vec<&TreatmentSchedule> =
                scas.iter().filter(|s| s.boundary.contains(*point)).collect();
            if inside.len() > 1 {
                return Err(Error::ScaOverlap {
                    unit_id: unit_id.clone(),
                    n: inside.len(),
                });
            }
            let inside_sca = inside.pop();

            let cb = cbs.iter().find(|cb| cb.boundary.contains(*point));
            let cb_id = cb
                .map(|cb| cb.cb_id.clone())
                .or_else(|| inside_sca.map(|s| s.cb_id.clone()));

            let mut downwind_of = BTreeSet::new();
            for (sca_id, poly) in downwind_polys {
                let in_own_boundary = scas
                    .iter()
                    .find(|s| &s.sca_id == sca_id)
                    .is_some_and(|s| s.boundary.contains(*point));
                if poly.contains(*point) && !in_own_boundary {
                    downwind_of.insert(sca_id.clone());
                }
            }

            let control_class = if inside_sca.is_some() {
                ControlClass::InsideSca
            } else {
                match cb {
                    Some(cb) if cb.adopting => ControlClass::OutsideScaInAdoptingCb,
                    Some(_) => ControlClass::NonAdoptingCb,
                    None => ControlClass::OutsideCbNeverAdopter,
                }
            };

            Ok(UnitAssignment {
                unit_id: unit_id.clone(),
                cb_id,
                inside_sca: inside_sca.map(|s| s.sca_id.clone()),
                downwind_of,
                control_class,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::YearMonth;
    use approx::assert_relative_eq;

    fn ym(year: i32, month: u32) -> YearMonth {
        YearMonth::new(year, month).unwrap()
    }

    fn square(x0: f64, y0: f64, side: f64) -> Polygon {
        Polygon::new(
            vec![
                Point::new(x0, y0),
                Point::new(x0 + side, y0),
                Point::new(x0 + side, y0 + side),
                Point::new(x0, y0 + side),
                Point::new(x0, y0),
            ],
            vec![],
        )
        .unwrap()
    }

    fn schedule(boundary: Polygon) -> TreatmentSchedule {
        TreatmentSchedule::new("sca-1", "cb-1", boundary, ym(1960, 1), ym(1961, 5)).unwrap()
    }

    fn rotate(p: Point, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(
            p.easting * c - p.northing * s,
            p.easting * s + p.northing * c,
        )
    }

    #[test]
    fn mean_wind_examples() {
        let submission = ym(1960, 1);
        let constant: Vec<_> = (1..=24)
            .map(|k| (submission.add_months(-k), WindVector::new(1.0, 0.0)))
            .collect();
        let w = mean_wind(&constant, submission).unwrap();
        assert_relative_eq!(w.u_east, 1.0);
        assert_relative_eq!(w.v_north, 0.0);

        let mixed: Vec<_> = (1..=24)
            .map(|k| {
                let w = if k <= 12 {
                    WindVector::new(1.0, 0.0)
                } else {
                    WindVector::new(0.0, 1.0)
                };
                (submission.add_months(-k), w)
            })
            .collect();
        let w = mean_wind(&mixed, submission).unwrap();
        assert_relative_eq!(w.u_east, 0.5);
        assert_relative_eq!(w.v_north, 0.5);

        let opposing: Vec<_> = (1..=24)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                (submission.add_months(-k), WindVector::new(sign, 0.0))
            })
            .collect();
        let w = mean_wind(&opposing, submission).unwrap();
        assert_relative_eq!(w.u_east, 0.0);
        assert!(w.is_degenerate());
    }

    #[test]
    fn mean_wind_ignores_months_outside_the_window() {
        let submission = ym(1960, 1);
        let mut series: Vec<_> = (1..=24)
            .map(|k| (submission.add_months(-k), WindVector::new(2.0, 0.0)))
            .collect();
        series.push((submission, WindVector::new(100.0, 100.0)));
        series.push((submission.add_months(-25), WindVector::new(-100.0, 0.0)));
        let w = mean_wind(&series, submission).unwrap();
        assert_relative_eq!(w.u_east, 2.0);
        assert_relative_eq!(w.v_north, 0.0);
    }

    #[test]
    fn mean_wind_requires_observations() {
        assert!(matches!(
            mean_wind(&[], ym(1960, 1)),
            Err(Error::EmptyWindWindow(_))
        ));
    }

    #[test]
    fn triangle_points_downwind_with_fixed_dimensions() {
        // Unit square centered on the origin, due-east wind.
        let sca = schedule(square(-0.5, -0.5, 1.0));
        let tri = triangle_downwind(&sca, WindVector::new(3.0, 0.0)).unwrap();
        let expected_half_width = DOWNWIND_REACH_M * DOWNWIND_HALF_ANGLE_RAD.tan();
        assert_relative_eq!(expected_half_width, 2071.067811865475, max_relative = 1e-12);
        // Ring holds apex and the two base corners.
        let vs = &tri.exterior()[..3];
        assert!(vs.iter().any(|p| p.easting.abs() < 1e-9 && p.northing.abs() < 1e-9));
        assert!(vs
            .iter()
            .any(|p| (p.easting - 5000.0).abs() < 1e-9
                && (p.northing - expected_half_width).abs() < 1e-9));
        assert!(vs
            .iter()
            .any(|p| (p.easting - 5000.0).abs() < 1e-9
                && (p.northing + expected_half_width).abs() < 1e-9));
        // Height and angle are fixed, so the area is the same for any SCA.
        assert_relative_eq!(
            tri.area(),
            DOWNWIND_REACH_M * DOWNWIND_REACH_M * DOWNWIND_HALF_ANGLE_RAD.tan(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn triangle_rotates_with_the_wind() {
        let sca = schedule(square(-0.5, -0.5, 1.0));
        let east = triangle_downwind(&sca, WindVector::new(1.0, 0.0)).unwrap();
        let north = triangle_downwind(&sca, WindVector::new(0.0, 1.0)).unwrap();
        let angle = std::f64::consts::FRAC_PI_2;
        for v in east.exterior() {
            let r = rotate(*v, angle);
            assert!(north
                .exterior()
                .iter()
                .any(|p| (p.easting - r.easting).abs() < 1e-6
                    && (p.northing - r.northing).abs() < 1e-6));
        }
    }

    #[test]
    fn zero_wind_is_rejected() {
        let sca = schedule(square(-0.5, -0.5, 1.0));
        assert!(matches!(
            triangle_downwind(&sca, WindVector::new(0.0, 0.0)),
            Err(Error::DegenerateWind)
        ));
        assert!(matches!(
            scaled_polygon_downwind(&sca, WindVector::new(0.0, 0.0)),
            Err(Error::DegenerateWind)
        ));
    }

    #[test]
    fn scaled_polygon_opens_downwind_from_the_crosswind_extremes() {
        // 1 km square, due-east wind: anchors are the first north-extreme
        // and south-extreme vertices in ring order.
        let sca = schedule(square(0.0, 0.0, 1000.0));
        let poly = scaled_polygon_downwind(&sca, WindVector::new(4.0, 0.0)).unwrap();
        let vs: Vec<Point> = poly.exterior()[..4].to_vec();
        let reach_e = DOWNWIND_REACH_M * DOWNWIND_HALF_ANGLE_RAD.cos();
        let reach_n = DOWNWIND_REACH_M * DOWNWIND_HALF_ANGLE_RAD.sin();
        for expected in [
            Point::new(0.0, 0.0),
            Point::new(1000.0, 1000.0),
            Point::new(reach_e, -reach_n),
            Point::new(1000.0 + reach_e, 1000.0 + reach_n),
        ] {
            assert!(
                vs.iter().any(|p| (p.easting - expected.easting).abs() < 1e-6
                    && (p.northing - expected.northing).abs() < 1e-6),
                "missing vertex {expected:?} in {vs:?}"
            );
        }
        // The region covers points due east of the SCA.
        assert!(poly.contains(Point::new(2500.0, 500.0)));
        assert!(!poly.contains(Point::new(-1500.0, 500.0)));
    }

    #[test]
    fn scaled_polygon_reflects_with_the_wind() {
        // Diamond with unique crosswind extremes, so the anchor choice is
        // tie-free and commutes with reflection about its vertical axis.
        let diamond = Polygon::new(
            vec![
                Point::new(500.0, 0.0),
                Point::new(1000.0, 500.0),
                Point::new(500.0, 1000.0),
                Point::new(0.0, 500.0),
                Point::new(500.0, 0.0),
            ],
            vec![],
        )
        .unwrap();
        let sca = schedule(diamond);
        let east = scaled_polygon_downwind(&sca, WindVector::new(1.0, 0.0)).unwrap();
        let west = scaled_polygon_downwind(&sca, WindVector::new(-1.0, 0.0)).unwrap();
        for v in east.exterior() {
            let mirrored = Point::new(1000.0 - v.easting, v.northing);
            assert!(
                west.exterior()
                    .iter()
                    .any(|p| (p.easting - mirrored.easting).abs() < 1e-6
                        && (p.northing - mirrored.northing).abs() < 1e-6),
                "missing mirrored vertex {mirrored:?}"
            );
        }
    }

    #[test]
    fn scaled_polygon_rejects_wind_parallel_thin_scas() {
        // Degenerate sliver: effectively no crosswind extent under an
        // east wind is impossible for a valid polygon, so use a long thin
        // diagonal whose anchors separate too far downwind instead.
        let thin = Polygon::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(20_000.0, 2_000.0),
                Point::new(20_000.0, 2_001.0),
                Point::new(0.0, 1.0),
                Point::new(0.0, 0.0),
            ],
            vec![],
        )
        .unwrap();
        let sca = schedule(thin);
        assert!(matches!(
            scaled_polygon_downwind(&sca, WindVector::new(1.0, 0.0)),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn downwind_constructions_are_rotation_equivariant() {
        let base = square(2000.0, -500.0, 1000.0);
        let wind = WindVector::new(1.0, 0.25);
        let angle = 0.7f64;
        let rotated_ring: Vec<Point> = base.exterior().iter().map(|p| rotate(*p, angle)).collect();
        let rotated = Polygon::new(rotated_ring, vec![]).unwrap();
        let rotated_wind = {
            let w = rotate(Point::new(wind.u_east, wind.v_north), angle);
            WindVector::new(w.easting, w.northing)
        };
        let sca = schedule(base);
        let sca_rot = schedule(rotated);
        for (plain, rot) in [
            (
                triangle_downwind(&sca, wind).unwrap(),
                triangle_downwind(&sca_rot, rotated_wind).unwrap(),
            ),
            (
                scaled_polygon_downwind(&sca, wind).unwrap(),
                scaled_polygon_downwind(&sca_rot, rotated_wind).unwrap(),
            ),
        ] {
            assert_relative_eq!(plain.area(), rot.area(), max_relative = 1e-9);
            for v in plain.exterior() {
                let r = rotate(*v, angle);
                assert!(
                    rot.exterior()
                        .iter()
                        .any(|p| (p.easting - r.easting).abs() < 1e-6
                            && (p.northing - r.northing).abs() < 1e-6),
                    "rotated construction lost vertex {r:?}"
                );
            }
        }
    }

    #[test]
    fn assign_units_classifies_all_four_groups() {
        let sca = schedule(square(0.0, 0.0, 1000.0));
        let cbs = vec![
            CbBoundary {
                cb_id: "cb-1".to_owned(),
                boundary: square(-1000.0, -1000.0, 4000.0),
                adopting: true,
            },
            CbBoundary {
                cb_id: "cb-2".to_owned(),
                boundary: square(10_000.0, 0.0, 4000.0),
                adopting: false,
            },
        ];
        let downwind = BTreeMap::from([(
            "sca-1".to_owned(),
            scaled_polygon_downwind(&sca, WindVector::new(1.0, 0.0)).unwrap(),
        )]);
        let units = vec![
            ("inside".to_owned(), Point::new(500.0, 500.0)),
            ("in_cb".to_owned(), Point::new(-500.0, -500.0)),
            ("never".to_owned(), Point::new(11_000.0, 1000.0)),
            ("nowhere".to_owned(), Point::new(-9000.0, -9000.0)),
            ("downwind".to_owned(), Point::new(2500.0, 500.0)),
        ];
        let out = assign_units(&units, &cbs, &[sca], &downwind).unwrap();
        assert_eq!(out[0].control_class, ControlClass::InsideSca);
        assert_eq!(out[0].inside_sca.as_deref(), Some("sca-1"));
        assert_eq!(out[1].control_class, ControlClass::OutsideScaInAdoptingCb);
        assert_eq!(out[2].control_class, ControlClass::NonAdoptingCb);
        assert_eq!(out[3].control_class, ControlClass::OutsideCbNeverAdopter);
        assert!(out[3].cb_id.is_none());
        // The downwind station sits inside the dispersion region but outside
        // the SCA itself.
        assert!(out[4].downwind_of.contains("sca-1"));
        assert!(out[4].inside_sca.is_none());
        // A unit inside the SCA is never downwind of it.
        assert!(out[0].downwind_of.is_empty());
    }

    #[test]
    fn assign_units_rejects_overlapping_scas() {
        let a = schedule(square(0.0, 0.0, 1000.0));
        let mut b = schedule(square(500.0, 0.0, 1000.0));
        b.sca_id = "sca-2".to_owned();
        let units = vec![("u".to_owned(), Point::new(700.0, 500.0))];
        let err = assign_units(&units, &[], &[a, b], &BTreeMap::new());
        assert!(matches!(err, Err(Error::ScaOverlap { n: 2, .. })));
    }

    #[test]
    fn control_classes_partition_units() {
        let sca = schedule(square(0.0, 0.0, 1000.0));
        let cbs = vec![CbBoundary {
            cb_id: "cb-1".to_owned(),
            boundary: square(-1000.0, -1000.0, 4000.0),
            adopting: true,
        }];
        let units: Vec<(String, Point)> = (0..100)
            .map(|i| {
                let e = (i % 10) as f64 * 700.0 - 1500.0;
                let n = (i / 10) as f64 * 700.0 - 1500.0;
                (format!("u{i}"), Point::new(e, n))
            })
            .collect();
        let out = assign_units(&units, &cbs, &[sca], &BTreeMap::new()).unwrap();
        assert_eq!(out.len(), units.len());
        for a in &out {
            match a.control_class {
                ControlClass::InsideSca => assert!(a.inside_sca.is_some()),
                ControlClass::OutsideScaInAdoptingCb | ControlClass::NonAdoptingCb => {
                    assert!(a.inside_sca.is_none() && a.cb_id.is_some())
                }
                ControlClass::OutsideCbNeverAdopter => {
                    assert!(a.inside_sca.is_none() && a.cb_id.is_none())
                }
            }
        }
    }
}
