//! Planar geometry over projected easting/northing coordinates (meters).
//!
//! Boundaries are simple rings validated on construction, so downstream
//! code never sees self-intersecting or unclosed geometry. Containment is
//! even-odd ray casting with points on an edge counting as inside: the
//! tie-break is arbitrary but fixed so that unit classification is
//! deterministic at polygon edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A location in projected meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub easting: f64,
    pub northing: f64,
}

impl Point {
    pub fn new(easting: f64, northing: f64) -> Self {
        Self { easting, northing }
    }

    pub fn offset(self, de: f64, dn: f64) -> Self {
        Self::new(self.easting + de, self.northing + dn)
    }
}

/// Cross product (b - a) x (c - a); positive when `c` lies left of `a -> b`.
fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b.easting - a.easting) * (c.northing - a.northing)
        - (b.northing - a.northing) * (c.easting - a.easting)
}

/// Twice the signed ring area (positive for counterclockwise rings).
/// Anchored at the first vertex so small rings far from the origin do not
/// lose the area to cancellation.
fn signed_area2(ring: &[Point]) -> f64 {
    let o = ring[0];
    ring.windows(2).map(|e| cross(o, e[0], e[1])).sum()
}

/// Doubled area and doubled first moments of one ring about anchor `o`.
fn ring_moments(o: Point, ring: &[Point]) -> (f64, f64, f64) {
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for e in ring.windows(2) {
        let ax = e[0].easting - o.easting;
        let ay = e[0].northing - o.northing;
        let bx = e[1].easting - o.easting;
        let by = e[1].northing - o.northing;
        let w = ax * by - bx * ay;
        area2 += w;
        cx += (ax + bx) * w;
        cy += (ay + by) * w;
    }
    (area2, cx, cy)
}

/// True when `p` lies on the closed segment `a -> b`. Exact arithmetic:
/// only points that are bitwise collinear with the edge qualify, which is
/// the fixed boundary convention used throughout.
fn on_segment(p: Point, a: Point, b: Point) -> bool {
    if cross(a, b, p) != 0.0 {
        return false;
    }
    let dot = (p.easting - a.easting) * (b.easting - a.easting)
        + (p.northing - a.northing) * (b.northing - a.northing);
    let len2 = (b.easting - a.easting).powi(2) + (b.northing - a.northing).powi(2);
    dot >= 0.0 && dot <= len2
}

fn segments_cross(p1: Point, p2: Point, p3: Point, p4: Point) -> bool {
    let d1 = cross(p3, p4, p1);
    let d2 = cross(p3, p4, p2);
    let d3 = cross(p1, p2, p3);
    let d4 = cross(p1, p2, p4);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(p1, p3, p4))
        || (d2 == 0.0 && on_segment(p2, p3, p4))
        || (d3 == 0.0 && on_segment(p3, p1, p2))
        || (d4 == 0.0 && on_segment(p4, p1, p2))
}

/// A simple polygon with optional holes.
///
/// Rings are stored closed (first vertex repeated at the end) and
/// orientation-normalized: exterior counterclockwise, holes clockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolygon")]
pub struct Polygon {
    exterior: Vec<Point>,
    holes: Vec<Vec<Point>>,
}

#[derive(Deserialize)]
struct RawPolygon {
    exterior: Vec<Point>,
    #[serde(default)]
    holes: Vec<Vec<Point>>,
}

impl TryFrom<RawPolygon> for Polygon {
    type Error = Error;

    fn try_from(raw: RawPolygon) -> Result<Self> {
        Polygon::new(raw.exterior, raw.holes)
    }
}

impl Polygon {
    /// Validates and normalizes the rings: closed, at least four stored
    /// vertices, finite coordinates, nonzero area, and simple (no repeated
    /// vertices, no intersections between non-adjacent edges).
    pub fn new(exterior: Vec<Point>, holes: Vec<Vec<Point>>) -> Result<Self> {
        let mut exterior = validate_ring(exterior, "exterior")?;
        if signed_area2(&exterior) < 0.0 {
            exterior.reverse();
        }
        let holes = holes
            .into_iter()
            .enumerate()
            .map(|(i, ring)| {
                let mut ring = validate_ring(ring, &format!("hole {i}"))?;
                if signed_area2(&ring) > 0.0 {
                    ring.reverse();
                }
                Ok(ring)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { exterior, holes })
    }

    /// Closed exterior ring, counterclockwise.
    pub fn exterior(&self) -> &[Point] {
        &self.exterior
    }

    /// Closed hole rings, clockwise.
    pub fn holes(&self) -> &[Vec<Point>] {
        &self.holes
    }

    fn rings(&self) -> impl Iterator<Item = &[Point]> {
        std::iter::once(self.exterior.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    /// Shoelace area of the exterior minus the holes, in m².
    pub fn area(&self) -> f64 {
        self.rings().map(signed_area2).sum::<f64>() / 2.0
    }

    /// Area-weighted centroid with holes subtracted.
    pub fn centroid(&self) -> Result<Point> {
        // One shared anchor keeps the moment sums well-scaled regardless
        // of how far the polygon sits from the origin.
        let o = self.exterior[0];
        let mut area2 = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for ring in self.rings() {
            let (a, x, y) = ring_moments(o, ring);
            area2 += a;
            cx += x;
            cy += y;
        }
        if area2 == 0.0 {
            return Err(Error::InvalidPolygon(
                "net area is zero; centroid undefined".to_owned(),
            ));
        }
        Ok(Point::new(
            o.easting + cx / (3.0 * area2),
            o.northing + cy / (3.0 * area2),
        ))
    }

    /// Even-odd containment; points exactly on any ring edge count as
    /// inside, and holes subtract.
    pub fn contains(&self, p: Point) -> bool {
        for ring in self.rings() {
            for e in ring.windows(2) {
                if on_segment(p, e[0], e[1]) {
                    return true;
                }
            }
        }
        let mut crossings = 0usize;
        for ring in self.rings() {
            for e in ring.windows(2) {
                let (a, b) = (e[0], e[1]);
                if (a.northing > p.northing) != (b.northing > p.northing) {
                    let x_hit = a.easting
                        + (p.northing - a.northing) * (b.easting - a.easting)
                            / (b.northing - a.northing);
                    if p.easting < x_hit {
                        crossings += 1;
                    }
                }
            }
        }
        crossings % 2 == 1
    }

    /// Axis-aligned bounding box of the exterior: (min corner, max corner).
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.exterior {
            min.easting = min.easting.min(v.easting);
            min.northing = min.northing.min(v.northing);
            max.easting = max.easting.max(v.easting);
            max.northing = max.northing.max(v.northing);
        }
        (min, max)
    }
}

fn validate_ring(ring: Vec<Point>, label: &str) -> Result<Vec<Point>> {
    let fail = |msg: String| Err(Error::InvalidPolygon(format!("{label} ring {msg}")));
    if ring.len() < 4 {
        return fail(format!("has {} vertices; need at least 4 stored", ring.len()));
    }
    if ring.iter().any(|p| !p.easting.is_finite() || !p.northing.is_finite()) {
        return fail("has non-finite coordinates".to_owned());
    }
    if ring.first() != ring.last() {
        return fail("is not closed (first vertex must repeat at the end)".to_owned());
    }
    if signed_area2(&ring) == 0.0 {
        return fail("has zero area".to_owned());
    }
    let n = ring.len() - 1; // distinct vertices
    for i in 0..n {
        for j in (i + 1)..n {
            if ring[i] == ring[j] {
                return fail(format!("repeats vertex {j} (first seen at {i})"));
            }
        }
    }
    // Edge k runs ring[k] -> ring[k+1]; edges adjacent in cyclic order share
    // one endpoint and are exempt.
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_cross(ring[i], ring[i + 1], ring[j], ring[j + 1]) {
                return fail(format!("self-intersects (edges {i} and {j})"));
            }
        }
    }
    Ok(ring)
}
