//! Pocket-flip convexification.
//!
//! A pocket of a simple polygon is a maximal region between the polygon and
//! its convex hull, bounded by one hull edge (the lid) and the polygon chain
//! beneath it. Reflecting the chain across the lid line keeps the perimeter
//! and the individual side lengths, keeps the polygon simple, and strictly
//! grows the area by twice the pocket area. Finitely many flips reach a
//! convex polygon; the trace records every step, the total area gain `τ`, and
//! the asymmetry `α_c` (area difference to the convexification, which equals
//! the symmetric difference because each step nests the previous polygon).

use serde::Serialize;
use thiserror::Error;

use crate::polygon::{Point2, Polygon, PolygonError};

/// Default flip budget; a guard against eps-induced livelock near degenerate
/// inputs, not a bound the theory needs.
pub const DEFAULT_MAX_STEPS: usize = 1000;

#[derive(Debug, Error)]
pub enum ConvexifyError {
    #[error("convex hull is degenerate (fewer than three extreme points)")]
    DegenerateHull,
    #[error("operation requires a simple polygon")]
    NotSimple,
    #[error("flip budget of {max_steps} steps exhausted; partial trace retained")]
    StepBudgetExceeded {
        max_steps: usize,
        trace: Box<FlipTrace>,
    },
    #[error(transparent)]
    Polygon(#[from] PolygonError),
}

/// One pocket: the lid's polygon vertex indices, the chain strictly between
/// them, and the enclosed area.
#[derive(Debug, Clone, Serialize)]
pub struct Pocket {
    pub lid: (usize, usize),
    pub chain: Vec<usize>,
    pub area: f64,
}

/// One executed flip.
#[derive(Debug, Clone)]
pub struct FlipStep {
    pub pocket: Pocket,
    /// Area gained by this flip; twice the pocket area.
    pub tau_i: f64,
    pub polygon_after: Polygon,
}

/// A full convexification run.
#[derive(Debug, Clone)]
pub struct FlipTrace {
    pub steps: Vec<FlipStep>,
    /// Total area gain `Σ τ_i`.
    pub tau: f64,
    pub final_polygon: Polygon,
    /// `F(final) − F(initial)`; equals `τ` for simple input.
    pub alpha_c: f64,
    /// False only on a budget-exhausted partial trace.
    pub complete: bool,
}

/// Which pocket to flip when several exist. Any order terminates for simple
/// polygons; the choice only has to be deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlipPolicy {
    /// First pocket in counterclockwise hull order.
    #[default]
    FirstPocket,
    /// Pocket of largest area, earliest on ties.
    LargestPocket,
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Indices of the convex hull in counterclockwise order, collinear boundary
/// points excluded (monotone chain; a point within `eps` of the running hull
/// edge counts as collinear).
pub fn convex_hull(points: &[Point2], eps: f64) -> Result<Vec<usize>, ConvexifyError> {
    if points.len() < 3 {
        return Err(ConvexifyError::DegenerateHull);
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        (points[a].x, points[a].y)
            .partial_cmp(&(points[b].x, points[b].y))
            .unwrap()
    });

    let build = |sequence: &[usize]| -> Vec<usize> {
        let mut hull: Vec<usize> = Vec::with_capacity(sequence.len());
        for &p in sequence {
            while hull.len() >= 2 {
                let o = hull[hull.len() - 2];
                let a = hull[hull.len() - 1];
                let chord = points[o].distance(&points[p]).max(eps);
                if cross(points[o], points[a], points[p]) <= eps * chord {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull
    };

    let mut lower = build(&order);
    let reversed: Vec<usize> = order.iter().rev().copied().collect();
    let mut upper = build(&reversed);
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(ConvexifyError::DegenerateHull);
    }
    Ok(lower)
}

fn distance_to_line(p: Point2, a: Point2, b: Point2) -> f64 {
    let len = a.distance(&b);
    if len == 0.0 {
        return p.distance(&a);
    }
    (cross(a, b, p) / len).abs()
}

/// One pocket per hull edge whose endpoints are non-adjacent on the polygon.
/// Chains lying within `eps` of their lid line count as on-hull, so a convex
/// polygon yields no pockets.
pub fn find_pockets(polygon: &Polygon) -> Result<Vec<Pocket>, ConvexifyError> {
    if !polygon.is_simple() {
        return Err(ConvexifyError::NotSimple);
    }
    let vertices = polygon.vertices();
    let n = polygon.n();
    let eps = polygon.eps();
    let hull = convex_hull(vertices, eps)?;
    let mut on_hull = vec![false; n];
    for &h in &hull {
        on_hull[h] = true;
    }
    let mut pockets = Vec::new();
    for k in 0..hull.len() {
        let a = hull[k];
        let b = hull[(k + 1) % hull.len()];
        let mut chain = Vec::new();
        let mut i = (a + 1) % n;
        while i != b {
            // A simple polygon visits its hull vertices in hull order, so the
            // walk from one hull vertex reaches the next before any other.
            assert!(!on_hull[i], "hull vertex inside a pocket chain");
            chain.push(i);
            i = (i + 1) % n;
        }
        if chain.is_empty() {
            continue;
        }
        let max_offset = chain
            .iter()
            .map(|&c| distance_to_line(vertices[c], vertices[a], vertices[b]))
            .fold(0.0f64, f64::max);
        if max_offset <= eps {
            continue;
        }
        // The loop lid-start → chain → lid-end runs clockwise around the
        // pocket, so its shoelace sum is negative.
        let mut loop_points: Vec<Point2> = Vec::with_capacity(chain.len() + 2);
        loop_points.push(vertices[a]);
        loop_points.extend(chain.iter().map(|&c| vertices[c]));
        loop_points.push(vertices[b]);
        let mut signed = 0.0;
        for i in 0..loop_points.len() {
            let p = loop_points[i];
            let q = loop_points[(i + 1) % loop_points.len()];
            signed += p.x * q.y - q.x * p.y;
        }
        let area = -0.5 * signed;
        if area <= 0.0 {
            continue;
        }
        pockets.push(Pocket {
            lid: (a, b),
            chain,
            area,
        });
    }
    Ok(pockets)
}

fn reflect(p: Point2, a: Point2, b: Point2) -> Point2 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len_sq = dx * dx + dy * dy;
    let t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq;
    let foot = Point2::new(a.x + t * dx, a.y + t * dy);
    Point2::new(2.0 * foot.x - p.x, 2.0 * foot.y - p.y)
}

/// Reflects the pocket chain across its lid line. The lid endpoints are fixed
/// by the reflection, so every side keeps its length and the vertex count is
/// unchanged.
pub fn flip(polygon: &Polygon, pocket: &Pocket) -> FlipStep {
    let vertices = polygon.vertices();
    let (a, b) = pocket.lid;
    let mut new_vertices = vertices.to_vec();
    for &c in &pocket.chain {
        new_vertices[c] = reflect(vertices[c], vertices[a], vertices[b]);
    }
    let before = polygon.signed_area().abs();
    let polygon_after =
        Polygon::new(new_vertices, polygon.eps()).expect("flip preserves polygon validity");
    let tau_i = polygon_after.signed_area().abs() - before;
    FlipStep {
        pocket: pocket.clone(),
        tau_i,
        polygon_after,
    }
}

/// Flips pockets until the polygon is convex, recording every step.
pub fn convexify(
    polygon: &Polygon,
    policy: FlipPolicy,
    max_steps: usize,
) -> Result<FlipTrace, ConvexifyError> {
    if !polygon.is_simple() {
        return Err(ConvexifyError::NotSimple);
    }
    let initial_area = polygon.signed_area().abs();
    let mut current = polygon.clone();
    let mut steps: Vec<FlipStep> = Vec::new();
    loop {
        let pockets = find_pockets(&current)?;
        if pockets.is_empty() {
            break;
        }
        if steps.len() >= max_steps {
            let tau: f64 = steps.iter().map(|s| s.tau_i).sum();
            let alpha_c = current.signed_area().abs() - initial_area;
            return Err(ConvexifyError::StepBudgetExceeded {
                max_steps,
                trace: Box::new(FlipTrace {
                    steps,
                    tau,
                    final_polygon: current,
                    alpha_c,
                    complete: false,
                }),
            });
        }
        let chosen = match policy {
            FlipPolicy::FirstPocket => pockets[0].clone(),
            FlipPolicy::LargestPocket => {
                let mut best = &pockets[0];
                for p in &pockets[1..] {
                    if p.area > best.area {
                        best = p;
                    }
                }
                best.clone()
            }
        };
        let step = flip(&current, &chosen);
        current = step.polygon_after.clone();
        steps.push(step);
    }
    let tau: f64 = steps.iter().map(|s| s.tau_i).sum();
    let alpha_c = current.signed_area().abs() - initial_area;
    Ok(FlipTrace {
        steps,
        tau,
        final_polygon: current,
        alpha_c,
        complete: true,
    })
}

/// Total flip area gain; zero exactly when the polygon is already convex.
pub fn tau(polygon: &Polygon) -> Result<f64, ConvexifyError> {
    convexify(polygon, FlipPolicy::FirstPocket, DEFAULT_MAX_STEPS).map(|t| t.tau)
}

/// Area of the symmetric difference to the convexification; each flip nests
/// the previous polygon, so this is a plain area difference.
pub fn alpha_c(polygon: &Polygon) -> Result<f64, ConvexifyError> {
    convexify(polygon, FlipPolicy::FirstPocket, DEFAULT_MAX_STEPS).map(|t| t.alpha_c)
}

/// Serializable form of a trace.
#[derive(Debug, Clone, Serialize)]
pub struct TraceJson {
    pub steps: Vec<TraceStepJson>,
    pub tau: f64,
    pub alpha_c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceStepJson {
    pub lid: [usize; 2],
    pub chain: Vec<usize>,
    pub tau_i: f64,
    pub vertices_after: Vec<[f64; 2]>,
}

impl FlipTrace {
    pub fn to_export(&self) -> TraceJson {
        TraceJson {
            steps: self
                .steps
                .iter()
                .map(|s| TraceStepJson {
                    lid: [s.pocket.lid.0, s.pocket.lid.1],
                    chain: s.pocket.chain.clone(),
                    tau_i: s.tau_i,
                    vertices_after: s
                        .polygon_after
                        .vertices()
                        .iter()
                        .map(|p| [p.x, p.y])
                        .collect(),
                })
                .collect(),
            tau: self.tau,
            alpha_c: self.alpha_c,
        }
    }
}
