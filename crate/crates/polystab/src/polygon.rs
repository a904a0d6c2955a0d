//! Planar polygons and their scalar metrics.
//!
//! A [`Polygon`] is an ordered vertex list validated at construction: at least
//! three vertices, finite coordinates, no consecutive duplicates. Simple
//! polygons are normalized to counterclockwise orientation; self-crossing
//! input is kept in the given order with orientation marked unknown.
//!
//! [`PolygonMetrics`] collects every scalar this toolkit reasons about:
//! perimeter `L`, sum of squared sides `S`, area `F`, the isoperimetric
//! deficit `δ = L² − 4n·tan(π/n)·F`, and the side/radius variances. Radii are
//! measured from the **vertex centroid** (the arithmetic mean of the
//! vertices), not the area centroid — the centering condition used throughout
//! is `Σ OAᵢ = 0`, which only the vertex mean satisfies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::manifold::AngularRadial;

/// Default absolute geometric tolerance, assuming coordinates of order one.
pub const DEFAULT_EPS: f64 = 1e-9;

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Winding of the stored vertex order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Ccw,
    Cw,
    Unknown,
}

#[derive(Debug, Error)]
pub enum PolygonError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("consecutive duplicate vertex at index {0}")]
    DuplicateVertex(usize),
    #[error("non-finite vertex coordinate")]
    NonFinite,
    #[error("operation requires a simple (non-self-intersecting) polygon")]
    SelfIntersecting,
    #[error("polygon is not star-shaped about its vertex centroid")]
    NotStarShaped,
}

/// An ordered planar polygon, immutable after construction.
#[derive(Debug, Clone)]
pub struct Polygon {
    vertices: Vec<Point2>,
    orientation: Orientation,
    simple: bool,
    eps: f64,
}

impl Polygon {
    /// Validates `raw` and builds a polygon.
    ///
    /// Simple polygons are reoriented to counterclockwise if needed;
    /// self-crossing polygons keep the given order with orientation
    /// [`Orientation::Unknown`].
    pub fn new(raw: Vec<Point2>, eps: f64) -> Result<Self, PolygonError> {
        if raw.iter().any(|p| !p.is_finite()) {
            return Err(PolygonError::NonFinite);
        }
        let n = raw.len();
        if n < 3 {
            return Err(PolygonError::TooFewVertices(n));
        }
        for i in 0..n {
            if raw[i].distance(&raw[(i + 1) % n]) <= eps {
                return Err(PolygonError::DuplicateVertex(i));
            }
        }
        let mut vertices = raw;
        let simple = is_simple_chain(&vertices, eps);
        let orientation = if simple {
            if shoelace(&vertices) < 0.0 {
                vertices.reverse();
            }
            Orientation::Ccw
        } else {
            Orientation::Unknown
        };
        Ok(Polygon {
            vertices,
            orientation,
            simple,
            eps,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Signed shoelace area: `½·Σ(xᵢ·yᵢ₊₁ − xᵢ₊₁·yᵢ)`, positive for
    /// counterclockwise simple polygons.
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    /// Arithmetic mean of the vertices; the point the radii are measured from.
    pub fn vertex_centroid(&self) -> Point2 {
        let n = self.n() as f64;
        let (sx, sy) = self
            .vertices
            .iter()
            .fold((0.0, 0.0), |(ax, ay), p| (ax + p.x, ay + p.y));
        Point2::new(sx / n, sy / n)
    }

    /// True iff no two non-adjacent edges intersect and adjacent edges meet
    /// only at their shared vertex. Cached at construction.
    pub fn is_simple(&self) -> bool {
        self.simple
    }

    /// True iff every turn along the boundary has one sign; turns whose
    /// deviation from straight is below `eps` count as straight.
    pub fn is_convex(&self) -> bool {
        let n = self.n();
        let mut pos = false;
        let mut neg = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            let e1 = (b.x - a.x, b.y - a.y);
            let e2 = (c.x - b.x, c.y - b.y);
            let cross = e1.0 * e2.1 - e1.1 * e2.0;
            // |cross| = dist(b, line ac)·|c − a|, so this is a distance test.
            let chord = ((e1.0 + e2.0).powi(2) + (e1.1 + e2.1).powi(2)).sqrt();
            if cross.abs() <= self.eps * chord {
                continue;
            }
            if cross > 0.0 {
                pos = true;
            } else {
                neg = true;
            }
        }
        !(pos && neg)
    }

    /// All scalar quantities of the polygon. The unsigned area is only
    /// meaningful for simple polygons, so self-crossing input is refused.
    pub fn metrics(&self) -> Result<PolygonMetrics, PolygonError> {
        if !self.simple {
            return Err(PolygonError::SelfIntersecting);
        }
        let n = self.n();
        let side_lengths: Vec<f64> = (0..n)
            .map(|i| self.vertices[i].distance(&self.vertices[(i + 1) % n]))
            .collect();
        let centroid = self.vertex_centroid();
        let radii: Vec<f64> = self.vertices.iter().map(|p| p.distance(&centroid)).collect();
        let perimeter: f64 = side_lengths.iter().sum();
        let sum_squared_sides: f64 = side_lengths.iter().map(|l| l * l).sum();
        let area = self.signed_area().abs();
        let nf = n as f64;
        let deficit_coefficient = 4.0 * nf * (PI / nf).tan();
        let delta = perimeter * perimeter - deficit_coefficient * area;
        let sigma_s2 = sum_squared_sides / nf - (perimeter / nf).powi(2);
        let radius_sum: f64 = radii.iter().sum();
        let radius_sq_sum: f64 = radii.iter().map(|r| r * r).sum();
        let sigma_r2 = radius_sq_sum / nf - (radius_sum / nf).powi(2);
        Ok(PolygonMetrics {
            n,
            side_lengths,
            radii,
            centroid,
            perimeter,
            sum_squared_sides,
            area,
            deficit_coefficient,
            delta,
            sigma_s2,
            sigma_r2,
            variation: sigma_s2 + sigma_r2,
        })
    }

    /// Angle–radius coordinates about the vertex centroid: `rᵢ = |OAᵢ|` and
    /// `xᵢ` the angle from `OAᵢ` to `OAᵢ₊₁`.
    ///
    /// Requires the polygon to be star-shaped about its vertex centroid: every
    /// radius positive and every consecutive angular gap in `(0, π)`; the gaps
    /// then sum to `2π`.
    pub fn to_angular_radial(&self) -> Result<AngularRadial, PolygonError> {
        let centroid = self.vertex_centroid();
        let n = self.n();
        let mut r = Vec::with_capacity(n);
        let mut theta = Vec::with_capacity(n);
        for p in &self.vertices {
            let radius = p.distance(&centroid);
            if radius <= self.eps {
                return Err(PolygonError::NotStarShaped);
            }
            r.push(radius);
            theta.push((p.y - centroid.y).atan2(p.x - centroid.x));
        }
        let mut x = Vec::with_capacity(n);
        for i in 0..n {
            let mut gap = theta[(i + 1) % n] - theta[i];
            while gap <= 0.0 {
                gap += 2.0 * PI;
            }
            while gap > 2.0 * PI {
                gap -= 2.0 * PI;
            }
            if gap >= PI {
                return Err(PolygonError::NotStarShaped);
            }
            x.push(gap);
        }
        Ok(AngularRadial { x, r })
    }

    /// Rebuilds a polygon from angle–radius coordinates, placing the first
    /// vertex on the positive x-axis. Inverse of [`Polygon::to_angular_radial`]
    /// up to rigid motion.
    pub fn from_angular_radial(z: &AngularRadial, eps: f64) -> Result<Self, PolygonError> {
        let n = z.n();
        let mut vertices = Vec::with_capacity(n);
        let mut theta = 0.0f64;
        for i in 0..n {
            vertices.push(Point2::new(z.r[i] * theta.cos(), z.r[i] * theta.sin()));
            theta += z.x[i];
        }
        Polygon::new(vertices, eps)
    }
}

/// Full scalar record for one polygon.
#[derive(Debug, Clone, Serialize)]
pub struct PolygonMetrics {
    pub n: usize,
    pub side_lengths: Vec<f64>,
    pub radii: Vec<f64>,
    pub centroid: Point2,
    /// Perimeter `L`.
    pub perimeter: f64,
    /// Sum of squared side lengths `S`.
    pub sum_squared_sides: f64,
    /// Unsigned area `F`.
    pub area: f64,
    /// `4n·tan(π/n)`, the coefficient in the deficit.
    pub deficit_coefficient: f64,
    /// Isoperimetric deficit `δ = L² − 4n·tan(π/n)·F`; zero exactly for
    /// convex regular polygons.
    pub delta: f64,
    /// Variance of the side lengths.
    pub sigma_s2: f64,
    /// Variance of the radii about the vertex centroid.
    pub sigma_r2: f64,
    /// `σ_s² + σ_r²`.
    pub variation: f64,
}

fn shoelace(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let mut sum = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        sum += a.x * b.y - b.x * a.y;
    }
    0.5 * sum
}

/// Signed distance of `c` from the oriented line through `a`, `b`.
fn line_side(a: Point2, b: Point2, c: Point2, eps: f64) -> i8 {
    let len = a.distance(&b).max(eps);
    let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let dist = cross / len;
    if dist > eps {
        1
    } else if dist < -eps {
        -1
    } else {
        0
    }
}

fn on_segment(a: Point2, b: Point2, c: Point2, eps: f64) -> bool {
    c.x >= a.x.min(b.x) - eps
        && c.x <= a.x.max(b.x) + eps
        && c.y >= a.y.min(b.y) - eps
        && c.y <= a.y.max(b.y) + eps
}

/// Whether segments `p1p2` and `q1q2` intersect (touching within `eps` counts).
pub(crate) fn segments_intersect(
    p1: Point2,
    p2: Point2,
    q1: Point2,
    q2: Point2,
    eps: f64,
) -> bool {
    let d1 = line_side(q1, q2, p1, eps);
    let d2 = line_side(q1, q2, p2, eps);
    let d3 = line_side(p1, p2, q1, eps);
    let d4 = line_side(p1, p2, q2, eps);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(q1, q2, p1, eps))
        || (d2 == 0 && on_segment(q1, q2, p2, eps))
        || (d3 == 0 && on_segment(p1, p2, q1, eps))
        || (d4 == 0 && on_segment(p1, p2, q2, eps))
}

fn is_simple_chain(vertices: &[Point2], eps: f64) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let (p1, p2) = (vertices[i], vertices[(i + 1) % n]);
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (q1, q2) = (vertices[j], vertices[(j + 1) % n]);
            if segments_intersect(p1, p2, q1, q2, eps) {
                return false;
            }
        }
    }
    // Adjacent edges: reject a zero-angle spike, where the boundary doubles
    // back on itself along the shared vertex.
    for i in 0..n {
        let v = vertices[(i + 1) % n];
        let a = vertices[i];
        let b = vertices[(i + 2) % n];
        let u = (a.x - v.x, a.y - v.y);
        let w = (b.x - v.x, b.y - v.y);
        let cross = u.0 * w.1 - u.1 * w.0;
        let dot = u.0 * w.0 + u.1 * w.1;
        let nu = (u.0 * u.0 + u.1 * u.1).sqrt();
        if dot > 0.0 && cross.abs() <= eps * nu {
            return false;
        }
    }
    true
}
