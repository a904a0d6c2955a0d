//! Polygon stability toolkit.
//!
//! Computes the polygonal isoperimetric deficit `δ(P) = L²(P) − 4n·tan(π/n)·F(P)`
//! together with the geometric quantities that bound it from below: the variance
//! of the side lengths, the variance of the radii (distances from the vertex
//! centroid), and the total area gained by pocket-flip convexification. On top of
//! the geometry sits the spectral machinery that certifies the bound: circulant
//! eigen-structure, closed-form Hessians at the regular configuration, and the
//! subspace inequalities they satisfy.
//!
//! Module map:
//! - [`polygon`] — polygon representation, validation, and all scalar metrics;
//! - [`convexify`] — pocket detection and flip convexification with full traces;
//! - [`circulant`] — circulant matrices, their closed-form spectra, and the
//!   shared real orthogonal eigenbasis;
//! - [`spectral`] — Hessian block matrices at the regular configuration and the
//!   identity/inequality verifier;
//! - [`manifold`] — angle–radius coordinates, the constraint manifold, and the
//!   stability-constant estimator;
//! - [`acceptance`] — the end-to-end verification suite run by `polystab verify`;
//! - [`corpus`], [`jsonfmt`], [`linalg`] — seeded polygon generation, canonical
//!   output formatting, and small dense-linear-algebra helpers.

pub mod acceptance;
pub mod circulant;
pub mod convexify;
pub mod corpus;
pub mod files;
pub mod jsonfmt;
pub mod linalg;
pub mod manifold;
pub mod polygon;
pub mod spectral;

pub use convexify::{FlipPolicy, FlipStep, FlipTrace, Pocket};
pub use manifold::{AngularRadial, RatioEstimate, StabilityConstants};
pub use polygon::{Point2, Polygon, PolygonMetrics, DEFAULT_EPS};
pub use spectral::SpectralBundle;
