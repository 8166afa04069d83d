//! Gaussian plume dispersion: per-chimney ground-level concentration,
//! SCA-level concentration fields, and extraction of the threshold contour
//! that defines the simulated downwind boundary.
//!
//! Emissions are in arbitrary units (population apportioned by area), so
//! absolute concentrations are not interpretable; the contour threshold is
//! a fraction of the field maximum and therefore invariant to the emission
//! scale.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::panel::TreatmentSchedule;
use crate::downwind::WindVector;

/// Pasquill-Gifford dispersion fit sigma = exp(a + b ln x + c ln² x).
/// Defaults are the moderate-wind regime (class C) constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionCoefficients {
    pub a_z: f64,
    pub b_z: f64,
    pub c_z: f64,
    pub a_y: f64,
    pub b_y: f64,
    pub c_y: f64,
}

impl Default for DispersionCoefficients {
    fn default() -> Self {
        Self {
            a_z: -2.341,
            b_z: 0.9477,
            c_z: -0.0020,
            a_y: -2.054,
            b_y: 1.0231,
            c_y: -0.0076,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlumeConfig {
    pub chimney_height_m: f64,
    pub chimney_spacing_m: f64,
    pub min_downwind_distance_m: f64,
    /// Floor applied to wind speed to avoid the 1/u singularity in calm
    /// months.
    pub min_wind_speed_ms: f64,
    /// Contour threshold as a fraction of the field maximum.
    pub contour_threshold_fraction: f64,
    pub grid_resolution_m: f64,
}

impl Default for PlumeConfig {
    fn default() -> Self {
        Self {
            chimney_height_m: 4.5,
            chimney_spacing_m: 200.0,
            min_downwind_distance_m: 1.0,
            min_wind_speed_ms: 0.5,
            contour_threshold_fraction: 0.05,
            grid_resolution_m: 100.0,
        }
    }
}

impl PlumeConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("chimney_height_m", self.chimney_height_m),
            ("chimney_spacing_m", self.chimney_spacing_m),
            ("min_downwind_distance_m", self.min_downwind_distance_m),
            ("min_wind_speed_ms", self.min_wind_speed_ms),
            ("grid_resolution_m", self.grid_resolution_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        let f = self.contour_threshold_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Validation(format!(
                "contour_threshold_fraction must lie in (0,1), got {f}"
            )));
        }
        Ok(())
    }
}

/// Crosswind and vertical dispersion widths at downwind distance `x` (m).
/// Returns (sigma_y, sigma_z). `x` must be positive.
pub fn sigma_yz(x: f64, coeffs: &DispersionCoefficients) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::DownwindDomain { x });
    }
    let lx = x.ln();
    let sigma_y = (coeffs.a_y + coeffs.b_y * lx + coeffs.c_y * lx * lx).exp();
    let sigma_z = (coeffs.a_z + coeffs.b_z * lx + coeffs.c_z * lx * lx).exp();
    Ok((sigma_y, sigma_z))
}

/// Ground-level concentration at downwind distance `x` and crosswind
/// offset `y` from one chimney emitting at rate `s` under wind speed `u`.
/// Zero for anything upwind of the minimum downwind distance; wind speed
/// is clamped to the configured floor.
pub fn chimney_concentration(
    x: f64,
    y: f64,
    s: f64,
    u: f64,
    cfg: &PlumeConfig,
    coeffs: &DispersionCoefficients,
) -> f64 {
    debug_assert!(s >= 0.0, "emission rate must be non-negative");
    if x < cfg.min_downwind_distance_m || x <= 0.0 {
        return 0.0;
    }
    let u = u.max(cfg.min_wind_speed_ms);
    let (sigma_y, sigma_z) = sigma_yz(x, coeffs).expect("x above the positive minimum distance");
    let h = cfg.chimney_height_m;
    s / (2.0 * std::f64::consts::PI * u * sigma_y * sigma_z)
        * (-y * y / (2.0 * sigma_y * sigma_y) - h * h / (2.0 * sigma_z * sigma_z)).exp()
}

/// Total SCA emission rate: CB population apportioned by area share, in
/// arbitrary emission units.
pub fn sca_emission(sca: &TreatmentSchedule, cb_area: f64, cb_population_1951: f64) -> f64 {
    assert!(cb_area > 0.0, "CB area must be positive");
    sca.boundary.area() / cb_area * cb_population_1951
}

/// Uniform chimney grid of pitch `spacing` clipped to the boundary, in
/// row-major order (northing ascending, then easting). The grid phase is
/// cell-centered on the bounding box. Falls back to a single chimney at
/// the centroid when no grid point lands inside.
pub fn chimney_grid(boundary: &Polygon, spacing: f64) -> Vec<Point> {
    assert!(spacing > 0.0, "chimney spacing must be positive");
    let (min, max) = boundary.bounding_box();
    let mut points = Vec::new();
    let mut northing = min.northing + spacing / 2.0;
    while northing < max.northing {
        let mut easting = min.easting + spacing / 2.0;
        while easting < max.easting {
            let p = Point::new(easting, northing);
            if boundary.contains(p) {
                points.push(p);
            }
            easting += spacing;
        }
        northing += spacing;
    }
    if points.is_empty() {
        let fallback = boundary.centroid().unwrap_or(Point::new(
            (min.easting + max.easting) / 2.0,
            (min.northing + max.northing) / 2.0,
        ));
        points.push(fallback);
    }
    points
}

/// A rectangular raster of ground-level concentrations. Values are stored
/// row-major with northing ascending; the value at (ix, iy) is the
/// concentration at the center of that cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationField {
    origin: Point,
    resolution_m: f64,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl ConcentrationField {
    pub fn new(origin: Point, resolution_m: f64, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != nx * ny {
            return Err(Error::Validation(format!(
                "field holds {} values for a {nx} x {ny} grid",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Validation(
                "field values must be finite and non-negative".to_owned(),
            ));
        }
        Ok(Self {
            origin,
            resolution_m,
            nx,
            ny,
            values,
        })
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn resolution_m(&self) -> f64 {
        self.resolution_m
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point {
        Point::new(
            self.origin.easting + (ix as f64 + 0.5) * self.resolution_m,
            self.origin.northing + (iy as f64 + 0.5) * self.resolution_m,
        )
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Nearest cell value at a point, or zero outside the raster.
    pub fn value_at(&self, p: Point) -> f64 {
        let ix = (p.easting - self.origin.easting) / self.resolution_m;
        let iy = (p.northing - self.origin.northing) / self.resolution_m;
        if ix < 0.0 || iy < 0.0 {
            return 0.0;
        }
        let (ix, iy) = (ix as usize, iy as usize);
        if ix >= self.nx || iy >= self.ny {
            return 0.0;
        }
        self.get(ix, iy)
    }
}

/// Summed concentration at `p` from all `chimneys` (each emitting `s_each`)
/// under the given wind. The chimney order is the summation order, so
/// identical inputs give bit-identical sums on any thread.
pub fn concentration_at(
    chimneys: &[Point],
    s_each: f64,
    wind_dir: (f64, f64),
    wind_speed: f64,
    cfg: &PlumeConfig,
    coeffs: &DispersionCoefficients,
    p: Point,
) -> f64 {
    let (we, wn) = wind_dir;
    let mut total = 0.0;
    for c in chimneys {
        let de = p.easting - c.easting;
        let dn = p.northing - c.northing;
        let x = de * we + dn * wn;
        let y = -de * wn + dn * we;
        total += chimney_concentration(x, y, s_each, wind_speed, cfg, coeffs);
    }
    total
}

/// Margin added around the SCA bounding box before gridding.
const GRID_MARGIN_M: f64 = 2_500.0;

/// Extra grid extent in the wind direction, where the plume travels.
const GRID_DOWNWIND_EXTENSION_M: f64 = 10_000.0;

/// Evaluates the summed plume of an SCA on a grid covering the SCA, a
/// [`GRID_MARGIN_M`] margin, and [`GRID_DOWNWIND_EXTENSION_M`] of downwind
/// reach. Cells are evaluated independently (parallel over rows) with a
/// fixed chimney summation order, so results do not depend on thread count.
pub fn plume_field(
    sca: &TreatmentSchedule,
    wind: WindVector,
    cfg: &PlumeConfig,
    coeffs: &DispersionCoefficients,
    cb_area: f64,
    cb_population_1951: f64,
) -> Result<ConcentrationField> {
    cfg.validate()?;
    let dir = wind.direction()?;
    let speed = wind.speed();
    if speed < cfg.min_wind_speed_ms {
        log::warn!(
            "wind speed {speed:.3} m/s below floor {:.3} m/s for {}; clamped",
            cfg.min_wind_speed_ms,
            sca.sca_id
        );
    }
    let speed = speed.max(cfg.min_wind_speed_ms);

    let total = sca_emission(sca, cb_area, cb_population_1951);
    let chimneys = chimney_grid(&sca.boundary, cfg.chimney_spacing_m);
    let s_each = total / chimneys.len() as f64;

    let (bb_min, bb_max) = sca.boundary.bounding_box();
    let min_e = bb_min.easting - GRID_MARGIN_M + (GRID_DOWNWIND_EXTENSION_M * dir.0).min(0.0);
    let max_e = bb_max.easting + GRID_MARGIN_M + (GRID_DOWNWIND_EXTENSION_M * dir.0).max(0.0);
    let min_n = bb_min.northing - GRID_MARGIN_M + (GRID_DOWNWIND_EXTENSION_M * dir.1).min(0.0);
    let max_n = bb_max.northing + GRID_MARGIN_M + (GRID_DOWNWIND_EXTENSION_M * dir.1).max(0.0);
    let res = cfg.grid_resolution_m;
    let nx = ((max_e - min_e) / res).ceil() as usize;
    let ny = ((max_n - min_n) / res).ceil() as usize;
    let origin = Point::new(min_e, min_n);

    let mut values = vec![0.0; nx * ny];
    values
        .par_chunks_mut(nx)
        .enumerate()
        .for_each(|(iy, row)| {
            let northing = origin.northing + (iy as f64 + 0.5) * res;
            for (ix, cell) in row.iter_mut().enumerate() {
                let p = Point::new(origin.easting + (ix as f64 + 0.5) * res, northing);
                *cell = concentration_at(&chimneys, s_each, dir, speed, cfg, coeffs, p);
            }
        });

    ConcentrationField::new(origin, res, nx, ny, values)
}

/// Extracts the dispersion boundary: the polygonized outline of the
/// largest 4-connected component of cells at or above
/// `contour_threshold_fraction` of the field maximum.
///
/// Vertices on the traced outline keep the in-set region on the left, so
/// the exterior comes out counterclockwise and enclosed holes clockwise.
pub fn contour_downwind(
    field: &ConcentrationField,
    sca_boundary: &Polygon,
    cfg: &PlumeConfig,
) -> Result<Polygon> {
    cfg.validate()?;
    let max = field.max_value();
    if !(max > 0.0) {
        return Err(Error::EmptyField);
    }
    let threshold = cfg.contour_threshold_fraction * max;
    let (nx, ny) = (field.nx, field.ny);
    let in_set: Vec<bool> = field.values.iter().map(|v| *v >= threshold).collect();
    if !in_set.iter().any(|b| *b) {
        return Err(Error::EmptyContour);
    }

    let component = largest_component(&in_set, nx, ny);
    let rings = trace_rings(&component, nx, ny);

    let mut exterior = None;
    let mut holes = Vec::new();
    for ring in rings {
        if ring_area2(&ring) > 0 {
            if exterior.replace(ring).is_some() {
                return Err(Error::Validation(
                    "contour produced multiple exterior rings".to_owned(),
                ));
            }
        } else {
            holes.push(ring);
        }
    }
    let exterior = exterior
        .ok_or_else(|| Error::Validation("contour produced no exterior ring".to_owned()))?;

    let to_points = |ring: Vec<(i64, i64)>| -> Vec<Point> {
        ring.into_iter()
            .map(|(gx, gy)| {
                Point::new(
                    field.origin.easting + gx as f64 * field.resolution_m,
                    field.origin.northing + gy as f64 * field.resolution_m,
                )
            })
            .collect()
    };

    let contour = Polygon::new(
        to_points(exterior),
        holes.into_iter().map(to_points).collect(),
    )?;

    let (c_min, c_max) = contour.bounding_box();
    let (s_min, s_max) = sca_boundary.bounding_box();
    let disjoint = c_max.easting < s_min.easting
        || c_min.easting > s_max.easting
        || c_max.northing < s_min.northing
        || c_min.northing > s_max.northing;
    if disjoint {
        log::warn!("dispersion contour does not touch the SCA bounding box");
    }
    Ok(contour)
}

/// Largest 4-connected true-cell component; ties resolved by smallest
/// row-major start index.
fn largest_component(in_set: &[bool], nx: usize, ny: usize) -> Vec<bool> {
    let mut label = vec![usize::MAX; in_set.len()];
    let mut best: Option<(usize, usize)> = None; // (count, component id)
    let mut next = 0usize;
    for start in 0..in_set.len() {
        if !in_set[start] || label[start] != usize::MAX {
            continue;
        }
        let id = next;
        next += 1;
        let mut count = 0usize;
        let mut stack = vec![start];
        label[start] = id;
        while let Some(cell) = stack.pop() {
            count += 1;
            let (ix, iy) = (cell % nx, cell / nx);
            let mut push = |jx: usize, jy: usize| {
                let j = jy * nx + jx;
                if in_set[j] && label[j] == usize::MAX {
                    label[j] = id;
                    stack.push(j);
                }
            };
            if ix > 0 {
                push(ix - 1, iy);
            }
            if ix + 1 < nx {
                push(ix + 1, iy);
            }
            if iy > 0 {
                push(ix, iy - 1);
            }
            if iy + 1 < ny {
                push(ix, iy + 1);
            }
        }
        if best.map_or(true, |(c, _)| count > c) {
            best = Some((count, id));
        }
    }
    let winner = best.expect("caller guarantees a nonempty set").1;
    label.iter().map(|l| *l == winner).collect()
}

/// Doubled signed area of an integer lattice ring.
fn ring_area2(ring: &[(i64, i64)]) -> i64 {
    ring.windows(2)
        .map(|e| e[0].0 * e[1].1 - e[1].0 * e[0].1)
        .sum()
}

const DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)]; // E N W S

/// Traces the boundary of a single 4-connected cell component into closed
/// lattice rings with the set on the left of every directed edge. At pinch
/// vertices (in-set cells touching only diagonally) the walk takes the
/// rightmost turn, which treats the two cells as joined there and splits
/// the background into separate regions; inside one 4-connected component
/// this is the pairing that keeps every ring simple. Collinear runs are
/// merged.
fn trace_rings(cells: &[bool], nx: usize, ny: usize) -> Vec<Vec<(i64, i64)>> {
    let at = |ix: i64, iy: i64| -> bool {
        ix >= 0 && iy >= 0 && (ix as usize) < nx && (iy as usize) < ny
            && cells[iy as usize * nx + ix as usize]
    };
    // Directed edges keyed by start vertex; direction index per DIRS.
    let mut edges: Vec<((i64, i64), usize)> = Vec::new();
    for iy in 0..ny as i64 {
        for ix in 0..nx as i64 {
            if !at(ix, iy) {
                continue;
            }
            if !at(ix, iy - 1) {
                edges.push(((ix, iy), 0)); // south side, walking east
            }
            if !at(ix + 1, iy) {
                edges.push(((ix + 1, iy), 1)); // east side, walking north
            }
            if !at(ix, iy + 1) {
                edges.push(((ix + 1, iy + 1), 2)); // north side, walking west
            }
            if !at(ix - 1, iy) {
                edges.push(((ix, iy + 1), 3)); // west side, walking south
            }
        }
    }
    let mut by_start: std::collections::BTreeMap<(i64, i64), Vec<usize>> =
        std::collections::BTreeMap::new();
    for (i, (start, _)) in edges.iter().enumerate() {
        by_start.entry(*start).or_default().push(i);
    }
    let mut used = vec![false; edges.len()];
    let mut rings = Vec::new();
    for first in 0..edges.len() {
        if used[first] {
            continue;
        }
        let mut ring = Vec::new();
        let mut edge = first;
        loop {
            used[edge] = true;
            let (start, dir) = edges[edge];
            ring.push(start);
            let end = (start.0 + DIRS[dir].0, start.1 + DIRS[dir].1);
            if end == edges[first].0 {
                ring.push(end);
                break;
            }
            // Prefer the rightmost continuation: right turn, straight,
            // left turn relative to the incoming direction.
            let candidates = &by_start[&end];
            let mut next = None;
            for turn in [3usize, 0, 1] {
                let want = (dir + turn) % 4;
                if let Some(&e) = candidates
                    .iter()
                    .find(|&&e| !used[e] && edges[e].1 == want)
                {
                    next = Some(e);
                    break;
                }
            }
            edge = next.expect("boundary edges always chain into closed rings");
        }
        rings.push(simplify_collinear(ring));
    }
    rings
}

/// Removes interior vertices of straight runs; the ring stays closed.
fn simplify_collinear(ring: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    let n = ring.len() - 1; // distinct vertices
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = ring[(i + n - 1) % n];
        let v = ring[i];
        let next = ring[(i + 1) % n];
        let turn = (v.0 - prev.0) * (next.1 - v.1) - (v.1 - prev.1) * (next.0 - v.0);
        if turn != 0 {
            out.push(v);
        }
    }
    let first = out[0];
    out.push(first);
    out
}
