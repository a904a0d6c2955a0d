//! Angle–radius coordinates and the constraint manifold they live on.
//!
//! A polygon star-shaped about its vertex centroid is described by `(x; r)`:
//! `x_i` the angle between consecutive radii and `r_i` the radius lengths.
//! In these coordinates the quantities `nS − c_n·F` and `L² − c_n·F` (with
//! `c_n = 4n·tan(π/n)`) become the functions [`f_eval`] and [`g_eval`], both
//! vanishing to second order at the regular configuration
//! `z_* = (2π/n, …; 1, …)`. The manifold `M` is cut out by four constraints:
//! the angles sum to `2π`, the radii sum to `n`, and the two centroid
//! components vanish; its dimension is `2n − 4`.
//!
//! The stability constant is estimated as the supremum of `f/g` over `M`:
//! multi-start projected gradient ascent away from `z_*`, plus the exact
//! quadratic-form limit at `z_*` computed from the Hessians restricted to the
//! tangent space.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::derive_seed;
use crate::linalg;

/// Tolerance below which the denominator `g` is treated as degenerate.
pub const DEGENERATE_G: f64 = 1e-14;

const ASCENT_MAX_ITERS: usize = 160;
const ASCENT_GRAD_TOL: f64 = 1e-10;
const SAMPLE_SPREADS: [f64; 8] = [0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.75, 0.9];

#[derive(Debug, Error)]
pub enum ManifoldError {
    #[error("projection did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("iterate left the positive orthant")]
    LeftPositiveOrthant,
    #[error("denominator g degenerated away from the regular configuration")]
    DegenerateDenominator,
    #[error("ratio bound {0} is below 1")]
    InvalidRatio(f64),
}

/// The coordinates `(x_1..x_n; r_1..r_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularRadial {
    /// Central angles in radians.
    pub x: Vec<f64>,
    /// Radii.
    pub r: Vec<f64>,
}

impl AngularRadial {
    pub fn new(x: Vec<f64>, r: Vec<f64>) -> Self {
        assert_eq!(x.len(), r.len(), "angle and radius counts must match");
        AngularRadial { x, r }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// The regular configuration `(2π/n, …; 1, …)`.
    pub fn z_star(n: usize) -> Self {
        AngularRadial {
            x: vec![2.0 * PI / n as f64; n],
            r: vec![1.0; n],
        }
    }

    pub fn to_vector(&self) -> DVector<f64> {
        let n = self.n();
        DVector::from_fn(2 * n, |i, _| if i < n { self.x[i] } else { self.r[i - n] })
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        let n = v.len() / 2;
        AngularRadial {
            x: (0..n).map(|i| v[i]).collect(),
            r: (0..n).map(|i| v[n + i]).collect(),
        }
    }

    /// Euclidean distance to the regular configuration.
    pub fn distance_to_star(&self) -> f64 {
        let n = self.n();
        let x_star = 2.0 * PI / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            sum += (self.x[i] - x_star).powi(2) + (self.r[i] - 1.0).powi(2);
        }
        sum.sqrt()
    }

    /// Smallest coordinate, for positivity guards.
    pub fn min_coordinate(&self) -> f64 {
        self.x
            .iter()
            .chain(self.r.iter())
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }
}

/// Residuals of the four manifold constraints at a point.
#[derive(Debug, Clone, Serialize)]
pub struct ConstraintResidual {
    /// `Σx_i − 2π`.
    pub h1: f64,
    /// `Σr_i − n`.
    pub h2: f64,
    /// Centroid component along the first radius direction.
    pub h3: f64,
    /// Centroid component orthogonal to it.
    pub h4: f64,
    /// Euclidean norm of the four residuals.
    pub norm: f64,
}

/// Cumulative angles `θ_i = Σ_{k<i} x_k` (empty sum is zero).
fn cumulative_angles(x: &[f64]) -> Vec<f64> {
    let mut theta = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for &xi in x {
        theta.push(acc);
        acc += xi;
    }
    theta
}

/// `f = nS − c_n·F` evaluated through the angle–radius formulas for `S` and `F`.
pub fn f_eval(z: &AngularRadial) -> f64 {
    let n = z.n();
    let nf = n as f64;
    let t = (PI / nf).tan();
    let mut sum_sq = 0.0;
    let mut sum_area = 0.0;
    for i in 0..n {
        let (ri, rj) = (z.r[i], z.r[(i + 1) % n]);
        sum_sq += rj * rj + ri * ri - 2.0 * ri * rj * z.x[i].cos();
        sum_area += ri * rj * z.x[i].sin();
    }
    nf * sum_sq - 2.0 * nf * t * sum_area
}

/// `g = L² − c_n·F`; the law-of-cosines radicand is clamped at zero against
/// negative round-off.
pub fn g_eval(z: &AngularRadial) -> f64 {
    let n = z.n();
    let nf = n as f64;
    let t = (PI / nf).tan();
    let mut perimeter = 0.0;
    let mut sum_area = 0.0;
    for i in 0..n {
        let (ri, rj) = (z.r[i], z.r[(i + 1) % n]);
        let sq = (rj * rj + ri * ri - 2.0 * ri * rj * z.x[i].cos()).max(0.0);
        perimeter += sq.sqrt();
        sum_area += ri * rj * z.x[i].sin();
    }
    perimeter * perimeter - 2.0 * nf * t * sum_area
}

/// The rescaled form `cos(π/n)·Σr_i² − Σ r_i r_{i+1}·cos(x_i − π/n)`, equal to
/// `cos(π/n)/(2n)·f`; this is the normalization whose Hessian the spectral
/// module materializes.
pub fn f_rescaled_eval(z: &AngularRadial) -> f64 {
    let n = z.n();
    let c = (PI / n as f64).cos();
    let mut sum = 0.0;
    for i in 0..n {
        let (ri, rj) = (z.r[i], z.r[(i + 1) % n]);
        sum += c * ri * ri - ri * rj * (z.x[i] - PI / n as f64).cos();
    }
    sum
}

/// Analytic gradient of [`f_eval`], laid out as `(∂x; ∂r)`.
pub fn f_gradient(z: &AngularRadial) -> DVector<f64> {
    let n = z.n();
    let nf = n as f64;
    let t = (PI / nf).tan();
    let mut grad = DVector::zeros(2 * n);
    for i in 0..n {
        let (ri, rj) = (z.r[i], z.r[(i + 1) % n]);
        grad[i] = 2.0 * nf * ri * rj * (z.x[i].sin() - t * z.x[i].cos());
    }
    for i in 0..n {
        let prev = (i + n - 1) % n;
        let next = (i + 1) % n;
        let (rp, rn) = (z.r[prev], z.r[next]);
        let (xp, xi) = (z.x[prev], z.x[i]);
        grad[n + i] = 2.0 * nf * (2.0 * z.r[i] - rn * xi.cos() - rp * xp.cos())
            - 2.0 * nf * t * (rn * xi.sin() + rp * xp.sin());
    }
    grad
}

/// Analytic gradient of [`g_eval`].
pub fn g_gradient(z: &AngularRadial) -> DVector<f64> {
    let n = z.n();
    let nf = n as f64;
    let t = (PI / nf).tan();
    let mut sides = Vec::with_capacity(n);
    for i in 0..n {
        let (ri, rj) = (z.r[i], z.r[(i + 1) % n]);
        let sq = (rj * rj + ri * ri - 2.0 * ri * rj * z.x[i].cos()).max(1e-300);
        sides.push(sq.sqrt());
    }
    let perimeter: f64 = sides.iter().sum();
    let mut grad = DVector::zeros(2 * n);
    for i in 0..n {
        let (ri, rj) = (z.r[i], z.r[(i + 1) % n]);
        grad[i] =
            2.0 * perimeter * ri * rj * z.x[i].sin() / sides[i] - 2.0 * nf * t * ri * rj * z.x[i].cos();
    }
    for i in 0..n {
        let prev = (i + n - 1) % n;
        let next = (i + 1) % n;
        let (rp, rn) = (z.r[prev], z.r[next]);
        let (xp, xi) = (z.x[prev], z.x[i]);
        let d_sides = (z.r[i] - rn * xi.cos()) / sides[i] + (z.r[i] - rp * xp.cos()) / sides[prev];
        grad[n + i] =
            2.0 * perimeter * d_sides - 2.0 * nf * t * (rn * xi.sin() + rp * xp.sin());
    }
    grad
}

/// The four constraint residuals at `z`.
pub fn residuals(z: &AngularRadial) -> ConstraintResidual {
    let n = z.n();
    let theta = cumulative_angles(&z.x);
    let h1 = z.x.iter().sum::<f64>() - 2.0 * PI;
    let h2 = z.r.iter().sum::<f64>() - n as f64;
    let mut h3 = 0.0;
    let mut h4 = 0.0;
    for (ri, ti) in z.r.iter().zip(&theta) {
        h3 += ri * ti.cos();
        h4 += ri * ti.sin();
    }
    let norm = (h1 * h1 + h2 * h2 + h3 * h3 + h4 * h4).sqrt();
    ConstraintResidual { h1, h2, h3, h4, norm }
}

fn residual_vector(z: &AngularRadial) -> DVector<f64> {
    let res = residuals(z);
    DVector::from_column_slice(&[res.h1, res.h2, res.h3, res.h4])
}

/// Jacobian of the four constraints, a `4 × 2n` matrix in `(x; r)` layout.
pub fn constraint_jacobian(z: &AngularRadial) -> DMatrix<f64> {
    let n = z.n();
    let theta = cumulative_angles(&z.x);
    let mut jac = DMatrix::zeros(4, 2 * n);
    for k in 0..n {
        jac[(0, k)] = 1.0;
        jac[(1, n + k)] = 1.0;
        jac[(2, n + k)] = theta[k].cos();
        jac[(3, n + k)] = theta[k].sin();
    }
    // θ_i depends on x_k exactly for i > k, so the angle columns carry
    // suffix sums of the radius terms.
    let mut suffix_sin = 0.0;
    let mut suffix_cos = 0.0;
    for k in (0..n).rev() {
        if k + 1 < n {
            suffix_sin += z.r[k + 1] * theta[k + 1].sin();
            suffix_cos += z.r[k + 1] * theta[k + 1].cos();
        }
        jac[(2, k)] = -suffix_sin;
        jac[(3, k)] = suffix_cos;
    }
    jac
}

pub(crate) fn project_with_stats(
    z0: &AngularRadial,
    tol: f64,
    max_iter: usize,
) -> Result<(AngularRadial, usize), ManifoldError> {
    if z0.min_coordinate() <= 0.0 {
        return Err(ManifoldError::LeftPositiveOrthant);
    }
    let mut z = z0.clone();
    let mut res = residual_vector(&z);
    if res.norm() >= 1.0 {
        return Err(ManifoldError::NoConvergence {
            iterations: 0,
            residual: res.norm(),
        });
    }
    for iter in 0..max_iter {
        if res.norm() <= tol {
            return Ok((z, iter));
        }
        let jac = constraint_jacobian(&z);
        let gram = &jac * jac.transpose();
        let chol = gram.cholesky().ok_or(ManifoldError::NoConvergence {
            iterations: iter,
            residual: res.norm(),
        })?;
        let full_step = jac.transpose() * chol.solve(&res);
        // Minimum-norm Gauss-Newton step, halved while it worsens the
        // residual or exits the positive orthant.
        let mut scale = 1.0;
        let mut accepted = false;
        let mut saw_positive = false;
        for _ in 0..8 {
            let cand_vec = z.to_vector() - &full_step * scale;
            let cand = AngularRadial::from_vector(&cand_vec);
            if cand.min_coordinate() <= 0.0 {
                scale *= 0.5;
                continue;
            }
            saw_positive = true;
            let cand_res = residual_vector(&cand);
            if cand_res.norm() < res.norm() {
                z = cand;
                res = cand_res;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return if saw_positive {
                Err(ManifoldError::NoConvergence {
                    iterations: iter,
                    residual: res.norm(),
                })
            } else {
                Err(ManifoldError::LeftPositiveOrthant)
            };
        }
    }
    if res.norm() <= tol {
        return Ok((z, max_iter));
    }
    Err(ManifoldError::NoConvergence {
        iterations: max_iter,
        residual: res.norm(),
    })
}

/// Projects `z0` onto the manifold by minimum-norm Gauss-Newton iteration on
/// the four constraints. Requires positive coordinates and a starting
/// residual norm below one.
pub fn project_to_m(
    z0: &AngularRadial,
    tol: f64,
    max_iter: usize,
) -> Result<AngularRadial, ManifoldError> {
    project_with_stats(z0, tol, max_iter).map(|(z, _)| z)
}

/// Orthonormal basis of the tangent space at `z_*`: the `(2n−4)`-dimensional
/// kernel of the four constraint gradients, returned as matrix columns.
pub fn tangent_basis_at_star(n: usize) -> DMatrix<f64> {
    assert!(n >= 3);
    let rows = constraint_jacobian(&AngularRadial::z_star(n));
    linalg::orthonormal_kernel_basis(&rows)
}

/// Draws a positive perturbation of `z_*` of relative size at most `spread`
/// and projects it onto the manifold.
///
/// The draw is normalized so the two sum constraints hold exactly, then the
/// radii get a minimum-norm linear correction that zeroes the centroid rows;
/// the Gauss-Newton polish afterwards starts well inside its basin. If a draw
/// still fails (spread close to one), it is retried deterministically at half
/// the spread.
pub fn sample_m(n: usize, seed: u64, spread: f64) -> Result<AngularRadial, ManifoldError> {
    assert!(n >= 3);
    assert!(spread > 0.0 && spread <= 1.0, "spread must lie in (0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempt_spread = spread;
    let mut last_err = ManifoldError::NoConvergence {
        iterations: 0,
        residual: f64::NAN,
    };
    for _ in 0..6 {
        let x_star = 2.0 * PI / n as f64;
        let mut x: Vec<f64> = (0..n)
            .map(|_| x_star * (1.0 + attempt_spread * rng.random_range(-0.95..0.95)))
            .collect();
        let mut r: Vec<f64> = (0..n)
            .map(|_| 1.0 + attempt_spread * rng.random_range(-0.95..0.95))
            .collect();
        let x_sum: f64 = x.iter().sum();
        let r_sum: f64 = r.iter().sum();
        x.iter_mut().for_each(|v| *v *= 2.0 * PI / x_sum);
        r.iter_mut().for_each(|v| *v *= n as f64 / r_sum);

        // The radius-sum and the two centroid constraints are linear in r for
        // fixed angles; one min-norm solve satisfies all three at once.
        let theta = cumulative_angles(&x);
        let rows = DMatrix::from_fn(3, n, |row, j| match row {
            0 => 1.0,
            1 => theta[j].cos(),
            _ => theta[j].sin(),
        });
        let z_draft = AngularRadial::new(x.clone(), r.clone());
        let res = residuals(&z_draft);
        let rhs = DVector::from_column_slice(&[res.h2, res.h3, res.h4]);
        let gram = &rows * rows.transpose();
        if let Some(chol) = gram.cholesky() {
            let correction = rows.transpose() * chol.solve(&rhs);
            for j in 0..n {
                r[j] -= correction[j];
            }
        }
        let z = AngularRadial::new(x, r);
        if z.min_coordinate() <= 1e-6 {
            attempt_spread *= 0.5;
            continue;
        }
        match project_to_m(&z, 1e-12, 60) {
            Ok(on_manifold) => return Ok(on_manifold),
            Err(err) => {
                last_err = err;
                attempt_spread *= 0.5;
            }
        }
    }
    Err(last_err)
}

/// Empirical bound for `sup f/g` over the manifold.
#[derive(Debug, Clone, Serialize)]
pub struct RatioEstimate {
    pub n: usize,
    /// Largest ratio found: the maximum of the ascent results and the
    /// quadratic-form limit at `z_*`.
    pub sup_ratio: f64,
    /// Largest generalized Rayleigh quotient of the two Hessians on the
    /// tangent space; the exact limit of `f/g` at `z_*`.
    pub limit_at_star: f64,
    pub restarts: usize,
    pub seed: u64,
    pub exclusion_radius: f64,
    /// Point attaining `sup_ratio` (`z_*` when the limit dominates).
    pub argmax: AngularRadial,
    /// Ascent starts discarded because `g` degenerated away from `z_*`.
    pub discarded_degenerate: usize,
    /// Per-restart ratio histories, recorded only on request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<Vec<RestartTrajectory>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RestartTrajectory {
    pub restart: usize,
    pub seed: u64,
    pub ratios: Vec<f64>,
}

/// Exact limit of `f/g` at `z_*`: the largest eigenvalue of the pencil formed
/// by the Hessians of the original `f` and of `g` restricted to the tangent
/// space.
pub fn limit_at_star(n: usize) -> f64 {
    let bundle = crate::spectral::build_bundle(n);
    let basis = tangent_basis_at_star(n);
    // Hessian of the original (unrescaled) f is 2n times the block matrix M.
    let f_orig_hess = &bundle.m_mat * (2.0 * n as f64);
    let a = basis.transpose() * f_orig_hess * &basis;
    let b = basis.transpose() * &bundle.g_hess * &basis;
    let eigs = linalg::generalized_symmetric_eigenvalues(&a, &b);
    *eigs.last().expect("tangent space is nonempty for n >= 3")
}

/// Multi-start projected-gradient ascent of `f/g` over the manifold outside a
/// ball around `z_*`, combined with the exact limit at `z_*`. Deterministic
/// for a fixed seed: every restart derives its own stream.
pub fn estimate_ratio_sup(
    n: usize,
    restarts: usize,
    seed: u64,
    exclusion_radius: f64,
) -> Result<RatioEstimate, ManifoldError> {
    estimate_ratio_sup_with(n, restarts, seed, exclusion_radius, false)
}

/// As [`estimate_ratio_sup`], optionally recording per-restart trajectories.
pub fn estimate_ratio_sup_with(
    n: usize,
    restarts: usize,
    seed: u64,
    exclusion_radius: f64,
    record_trajectories: bool,
) -> Result<RatioEstimate, ManifoldError> {
    assert!(restarts >= 1, "at least one restart is required");
    assert!(exclusion_radius > 0.0);
    let limit = limit_at_star(n);
    let mut best_ratio = f64::NEG_INFINITY;
    let mut best_point: Option<AngularRadial> = None;
    let mut discarded = 0usize;
    let mut trajectories = record_trajectories.then(Vec::new);

    for restart in 0..restarts {
        let restart_seed = derive_seed(seed, restart as u64);
        let spread = SAMPLE_SPREADS[restart % SAMPLE_SPREADS.len()];
        let start = match sample_m(n, restart_seed, spread) {
            Ok(z) => z,
            Err(_) => {
                discarded += 1;
                continue;
            }
        };
        match ascend(start, exclusion_radius, record_trajectories) {
            Some((point, ratio, history)) => {
                if let Some(t) = trajectories.as_mut() {
                    t.push(RestartTrajectory {
                        restart,
                        seed: restart_seed,
                        ratios: history,
                    });
                }
                if ratio > best_ratio {
                    best_ratio = ratio;
                    best_point = Some(point);
                }
            }
            None => discarded += 1,
        }
    }

    let (sup_ratio, argmax) = match best_point {
        Some(point) if best_ratio > limit => (best_ratio, point),
        _ => (limit.max(best_ratio), AngularRadial::z_star(n)),
    };
    Ok(RatioEstimate {
        n,
        sup_ratio,
        limit_at_star: limit,
        restarts,
        seed,
        exclusion_radius,
        argmax,
        discarded_degenerate: discarded,
        trajectories,
    })
}

fn ratio_at(z: &AngularRadial) -> Option<f64> {
    let g = g_eval(z);
    if g < DEGENERATE_G {
        return None;
    }
    Some(f_eval(z) / g)
}

/// Projected-gradient ascent with backtracking; every accepted iterate is
/// re-projected onto the manifold and kept outside the exclusion ball.
fn ascend(
    start: AngularRadial,
    exclusion_radius: f64,
    record: bool,
) -> Option<(AngularRadial, f64, Vec<f64>)> {
    if start.distance_to_star() < exclusion_radius {
        return None;
    }
    let mut z = start;
    let mut ratio = ratio_at(&z)?;
    let mut history = if record { vec![ratio] } else { Vec::new() };
    let mut step = 0.1;

    for _ in 0..ASCENT_MAX_ITERS {
        let g = g_eval(&z);
        let f = f_eval(&z);
        let euclid = (g_gradient(&z).scale(-f) + f_gradient(&z).scale(g)).scale(1.0 / (g * g));
        let jac = constraint_jacobian(&z);
        let gram = &jac * jac.transpose();
        let chol = gram.cholesky()?;
        let tangent = &euclid - jac.transpose() * chol.solve(&(&jac * &euclid));
        let norm = tangent.norm();
        if norm <= ASCENT_GRAD_TOL * ratio.abs().max(1.0) {
            break;
        }
        let direction = tangent.scale(1.0 / norm);

        let mut trial = step;
        let mut improved = false;
        for _ in 0..24 {
            let cand_vec = z.to_vector() + direction.scale(trial);
            let cand_raw = AngularRadial::from_vector(&cand_vec);
            if cand_raw.min_coordinate() <= 1e-9 {
                trial *= 0.5;
                continue;
            }
            let cand = match project_to_m(&cand_raw, 1e-12, 40) {
                Ok(z) => z,
                Err(_) => {
                    trial *= 0.5;
                    continue;
                }
            };
            if cand.distance_to_star() < exclusion_radius {
                trial *= 0.5;
                continue;
            }
            let cand_ratio = match ratio_at(&cand) {
                Some(r) => r,
                None => {
                    trial *= 0.5;
                    continue;
                }
            };
            if cand_ratio > ratio + 1e-13 * ratio.abs().max(1.0) {
                z = cand;
                ratio = cand_ratio;
                step = (trial * 2.0).min(0.5);
                improved = true;
                break;
            }
            trial *= 0.5;
        }
        if !improved {
            break;
        }
        if record {
            history.push(ratio);
        }
    }
    Some((z, ratio, history))
}

/// One point of an ε-scaling curve along a tangent direction at `z_*`.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingPoint {
    pub direction: usize,
    pub epsilon: f64,
    /// `f(z_* + εw)/ε²`; converges to `half_form_f`.
    pub f_over_eps2: f64,
    pub g_over_eps2: f64,
    /// `½⟨Hess f·w, w⟩` for the original (unrescaled) `f`.
    pub half_form_f: f64,
    pub half_form_g: f64,
}

/// Samples `f/ε²` and `g/ε²` along seeded random unit tangent directions at
/// `z_*` for `ε ∈ {1e-1, …, 1e-4}`, together with the half-quadratic-form
/// limits. This is the raw data behind the sharpness check; the CLI dumps it
/// as CSV.
pub fn scaling_curves(n: usize, directions: usize, seed: u64) -> Vec<ScalingPoint> {
    let bundle = crate::spectral::build_bundle(n);
    let basis = tangent_basis_at_star(n);
    let f_orig_hess = &bundle.m_mat * (2.0 * n as f64);
    let star = AngularRadial::z_star(n).to_vector();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    for direction in 0..directions {
        let coeffs = DVector::from_fn(basis.ncols(), |_, _| rng.random_range(-1.0..1.0));
        let w = (&basis * coeffs).normalize();
        let half_form_f = 0.5 * w.dot(&(&f_orig_hess * &w));
        let half_form_g = 0.5 * w.dot(&(&bundle.g_hess * &w));
        for &epsilon in &[1e-1, 1e-2, 1e-3, 1e-4] {
            let point = AngularRadial::from_vector(&(&star + w.scale(epsilon)));
            points.push(ScalingPoint {
                direction,
                epsilon,
                f_over_eps2: f_eval(&point) / (epsilon * epsilon),
                g_over_eps2: g_eval(&point) / (epsilon * epsilon),
                half_form_f,
                half_form_g,
            });
        }
    }
    points
}

/// The constants assembled from a ratio bound `C_ratio ≥ 1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityConstants {
    /// `σ_s² ≤ C_s·δ`.
    pub c_s: f64,
    /// `σ_r² ≤ C_r·δ`.
    pub c_r: f64,
    /// `τ ≤ C_tau·δ`.
    pub c_tau: f64,
    /// `τ + σ_s² + σ_r² ≤ C_theorem·δ`.
    pub c_theorem: f64,
}

/// Chains the ratio bound into per-quantity constants:
/// `nS − L² ≤ (C_ratio − 1)·(L² − c_n·F)` gives `C_s`; the radial Bonnesen
/// bound `8n²·sin²(π/n)·σ_r² ≤ δ + n²σ_s²` gives `C_r`; perimeter-invariant
/// flips give `C_tau = 1/c_n`; their sum bounds the full left-hand side since
/// the convexified polygon has no larger deficit.
pub fn combine_constants(n: usize, c_ratio: f64) -> Result<StabilityConstants, ManifoldError> {
    if c_ratio < 1.0 {
        return Err(ManifoldError::InvalidRatio(c_ratio));
    }
    let nf = n as f64;
    let sin2 = (PI / nf).sin().powi(2);
    let c_s = (c_ratio - 1.0) / (nf * nf);
    let c_r = (1.0 + nf * nf * c_s) / (8.0 * nf * nf * sin2);
    let c_tau = 1.0 / (4.0 * nf * (PI / nf).tan());
    Ok(StabilityConstants {
        c_s,
        c_r,
        c_tau,
        c_theorem: c_s + c_r + c_tau,
    })
}
