//! The end-to-end verification suite.
//!
//! Ten criteria, each a self-contained sweep with pinned tolerances. The
//! integration test target runs them in full; `polystab verify` runs them
//! with either the `--quick` bounds (sizes capped at 16, corpora at 50) or
//! the full ones.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circulant::{self, RealSymmetricEigenbasis};
use crate::convexify::{self, FlipPolicy};
use crate::corpus::{corpus_polygon, derive_seed};
use crate::linalg;
use crate::manifold::{self, AngularRadial};
use crate::polygon::{Point2, Polygon, DEFAULT_EPS};
use crate::spectral;

/// Bounds for one suite run.
#[derive(Debug, Clone, Copy)]
pub struct AcceptanceConfig {
    pub quick: bool,
}

impl AcceptanceConfig {
    pub fn full() -> Self {
        AcceptanceConfig { quick: false }
    }

    pub fn quick() -> Self {
        AcceptanceConfig { quick: true }
    }

    fn max_n(&self, full: usize) -> usize {
        if self.quick {
            full.min(16)
        } else {
            full
        }
    }

    fn count(&self, full: usize) -> usize {
        if self.quick {
            full.min(50)
        } else {
            full
        }
    }
}

/// Result of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn summary_line(&self) -> String {
        format!(
            "criterion {:2} ({}): {} — {} [{:.2}s]",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail,
            self.seconds
        )
    }
}

pub const CRITERION_NAMES: [&str; 10] = [
    "spectral identities",
    "eigenvalue closed form",
    "circulant eigenbasis",
    "lemma conditions",
    "hessian closed forms",
    "flip suite",
    "deficit bookkeeping",
    "radial bonnesen bound",
    "empirical stability theorem",
    "sharpness scaling",
];

/// Runs one criterion (1-based id).
pub fn run_criterion(id: usize, cfg: &AcceptanceConfig) -> CriterionOutcome {
    let start = Instant::now();
    let (passed, detail) = match id {
        1 => criterion_spectral_identities(cfg),
        2 => criterion_eigenvalue_closed_form(cfg),
        3 => criterion_circulant_eigenbasis(cfg),
        4 => criterion_lemma_conditions(cfg),
        5 => criterion_hessian_closed_forms(cfg),
        6 => criterion_flip_suite(cfg),
        7 => criterion_deficit_bookkeeping(cfg),
        8 => criterion_radial_bonnesen(cfg),
        9 => criterion_empirical_theorem(cfg),
        10 => criterion_sharpness_scaling(cfg),
        _ => panic!("criterion id must be 1..=10, got {id}"),
    };
    CriterionOutcome {
        id,
        name: CRITERION_NAMES[id - 1],
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs the whole suite in order.
pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionOutcome> {
    (1..=10).map(|id| run_criterion(id, cfg)).collect()
}

fn dart() -> Polygon {
    Polygon::new(
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 0.0),
            Point2::new(2.0, 1.0),
            Point2::new(2.0, 3.0),
        ],
        DEFAULT_EPS,
    )
    .unwrap()
}

fn criterion_spectral_identities(cfg: &AcceptanceConfig) -> (bool, String) {
    let max_n = cfg.max_n(64);
    let mut worst = 0.0f64;
    for n in 3..=max_n {
        let bundle = spectral::build_bundle(n);
        let nf = n as f64;
        let c2 = (PI / nf).cos().powi(2);
        let s2 = (PI / nf).sin().powi(2);
        let btb = bundle.b_mat.transpose() * &bundle.b_mat;
        let k_minus = &bundle.k_mat - &btb;
        let d_minus = &bundle.d_mat - &btb;
        worst = worst.max(linalg::max_abs(&(&k_minus - &bundle.h_mat / c2)));
        worst = worst.max(linalg::max_abs(&(&d_minus - &bundle.h_mat / (s2 * c2))));
    }
    (
        worst <= 1e-10,
        format!("n=3..={max_n}, worst elementwise identity error {worst:.2e} (tol 1e-10)"),
    )
}

fn criterion_eigenvalue_closed_form(cfg: &AcceptanceConfig) -> (bool, String) {
    let max_n = cfg.max_n(64);
    let mut worst = 0.0f64;
    for n in 3..=max_n {
        let bundle = spectral::build_bundle(n);
        let btb = bundle.b_mat.transpose() * &bundle.b_mat;
        let dense_lambda = linalg::symmetric_eigenvalues_sorted(&(&bundle.k_mat - &btb));
        let dense_mu = linalg::symmetric_eigenvalues_sorted(&(&bundle.d_mat - &btb));
        let mut lambda = bundle.lambda.clone();
        let mut mu = bundle.mu.clone();
        lambda.sort_by(|a, b| a.partial_cmp(b).unwrap());
        mu.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for k in 0..n {
            worst = worst.max((lambda[k] - dense_lambda[k]).abs());
            worst = worst.max((mu[k] - dense_mu[k]).abs());
        }
    }
    (
        worst <= 1e-10,
        format!("n=3..={max_n}, worst closed-form vs dense eigenvalue gap {worst:.2e} (tol 1e-10)"),
    )
}

fn criterion_circulant_eigenbasis(cfg: &AcceptanceConfig) -> (bool, String) {
    let max_n = cfg.max_n(32);
    let mut worst_eigen = 0.0f64;
    let mut worst_ortho = 0.0f64;
    for n in 3..=max_n {
        let basis = circulant::real_symmetric_eigenbasis(n);
        for j in 0..n {
            for k in (j + 1)..n {
                worst_ortho = worst_ortho.max(basis.vector(j).dot(basis.vector(k)).abs());
            }
        }
        for trial in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(1003 + n as u64, trial));
            let mut generator = vec![0.0f64; n];
            generator[0] = rng.random_range(-1.0..1.0);
            for j in 1..=(n / 2) {
                let v = rng.random_range(-1.0..1.0);
                generator[j] = v;
                generator[n - j] = v;
            }
            let circ = circulant::CirculantMatrix::from_real(&generator).unwrap();
            let psi = circ.eigenvalues();
            for k in 0..n {
                let v: Vec<f64> = basis.vector(k).iter().copied().collect();
                let av = circ.apply_real(&v).unwrap();
                let lambda = psi[RealSymmetricEigenbasis::eigenvalue_index(k)].re;
                for j in 0..n {
                    worst_eigen = worst_eigen.max((av[j] - lambda * v[j]).abs());
                }
            }
        }
    }
    (
        worst_eigen <= 1e-10 && worst_ortho <= 1e-10,
        format!(
            "n=3..={max_n}, 20 circulants each: worst eigen-relation error {worst_eigen:.2e}, worst off-diagonal inner product {worst_ortho:.2e} (tol 1e-10)"
        ),
    )
}

fn criterion_lemma_conditions(cfg: &AcceptanceConfig) -> (bool, String) {
    let max_n = cfg.max_n(32);
    let mut ok = true;
    let mut worst_value = 0.0f64;
    let mut worst_grad = 0.0f64;
    let mut worst_span = 0.0f64;
    let mut worst_margin = f64::NEG_INFINITY;
    let mut min_rayleigh = f64::INFINITY;
    for n in 3..=max_n {
        let nf = n as f64;
        let star = AngularRadial::z_star(n).to_vector();
        let eval_f = |v: &DVector<f64>| manifold::f_rescaled_eval(&AngularRadial::from_vector(v));
        let eval_g = |v: &DVector<f64>| manifold::g_eval(&AngularRadial::from_vector(v));

        // (i) both functions vanish at the regular configuration.
        worst_value = worst_value.max(eval_f(&star).abs()).max(eval_g(&star).abs());

        // (ii) finite-difference gradients match the closed forms, and the
        // closed forms live in the span of the two all-ones directions.
        let grad_f = spectral::fd_gradient(&eval_f, &star, spectral::FD_STEP);
        let grad_g = spectral::fd_gradient(&eval_g, &star, spectral::FD_STEP);
        let sin_n = (PI / nf).sin();
        let tan_term = 2.0 * nf * (PI / nf).tan();
        for i in 0..2 * n {
            let (cf, cg) = if i < n { (sin_n, tan_term) } else { (0.0, 0.0) };
            worst_grad = worst_grad.max((grad_f[i] - cf).abs());
            worst_grad = worst_grad.max((grad_g[i] - cg).abs());
        }
        // The closed-form gradients are constant on each block, so their
        // residual against the block-span is exactly zero; recompute it
        // numerically anyway.
        let closed_f = DVector::from_fn(2 * n, |i, _| if i < n { sin_n } else { 0.0 });
        let mean_x = closed_f.iter().take(n).sum::<f64>() / nf;
        let mut span_res = 0.0;
        for i in 0..n {
            span_res += (closed_f[i] - mean_x).powi(2) + closed_f[n + i].powi(2);
        }
        worst_span = worst_span.max(span_res.sqrt());

        // (iii) sampled quadratic-form inequality on the mean-zero subspace.
        let bundle = spectral::build_bundle(n);
        match spectral::check_u_le_v(&bundle, 10_000, derive_seed(1004, n as u64), 1e-12) {
            Ok(report) => worst_margin = worst_margin.max(report.max_margin),
            Err(_) => ok = false,
        }

        // (iv) positivity on the transformed tangent space.
        match spectral::min_rayleigh_u_on_htilde(&bundle) {
            Ok(least) => min_rayleigh = min_rayleigh.min(least),
            Err(_) => ok = false,
        }
    }
    ok = ok
        && worst_value <= 1e-12
        && worst_grad <= 1e-6
        && worst_span <= 1e-10
        && min_rayleigh > 0.0;
    (
        ok,
        format!(
            "n=3..={max_n}: |f|,|g| at z* <= {worst_value:.1e}; grad fd error {worst_grad:.1e}; span residual {worst_span:.1e}; worst <Uz,z>-<Vz,z> margin {worst_margin:.1e} on 1e4 samples; min Rayleigh on transformed tangent {min_rayleigh:.3e}"
        ),
    )
}

fn criterion_hessian_closed_forms(cfg: &AcceptanceConfig) -> (bool, String) {
    let max_n = cfg.max_n(12);
    let mut worst = 0.0f64;
    let mut ok = true;
    for n in 3..=max_n {
        match spectral::gradient_and_hessian_fd_check(n, spectral::FD_STEP) {
            Ok(report) => {
                worst = worst.max(report.max_hess_err_f).max(report.max_hess_err_g);
            }
            Err(_) => ok = false,
        }
    }
    (
        ok && worst <= 1e-5,
        format!("n=3..={max_n}, worst entrywise Hessian fd error {worst:.2e} (tol 1e-5)"),
    )
}

struct FlipSuiteStats {
    polygons: usize,
    max_steps_used: usize,
    worst_perimeter_drift: f64,
    worst_side_multiset_gap: f64,
    all_convex: bool,
    all_positive_gains: bool,
    all_complete: bool,
}

fn run_flip_suite(cfg: &AcceptanceConfig) -> FlipSuiteStats {
    let mut stats = FlipSuiteStats {
        polygons: 0,
        max_steps_used: 0,
        worst_perimeter_drift: 0.0,
        worst_side_multiset_gap: 0.0,
        all_convex: true,
        all_positive_gains: true,
        all_complete: true,
    };
    for n in 4..=cfg.max_n(12) {
        let seed = derive_seed(1006, n as u64);
        for index in 0..cfg.count(200) as u64 {
            let polygon = corpus_polygon(n, seed, index, DEFAULT_EPS);
            stats.polygons += 1;
            let trace = match convexify::convexify(&polygon, FlipPolicy::FirstPocket, 1000) {
                Ok(trace) => trace,
                Err(_) => {
                    stats.all_complete = false;
                    continue;
                }
            };
            stats.max_steps_used = stats.max_steps_used.max(trace.steps.len());
            let mut previous = polygon.clone();
            for step in &trace.steps {
                let before = previous.metrics().unwrap().perimeter;
                let after = step.polygon_after.metrics().unwrap().perimeter;
                stats.worst_perimeter_drift =
                    stats.worst_perimeter_drift.max((after - before).abs() / before);
                if step.tau_i <= 0.0 {
                    stats.all_positive_gains = false;
                }
                previous = step.polygon_after.clone();
            }
            if !trace.final_polygon.is_convex() {
                stats.all_convex = false;
            }
            let mut before_sides = polygon.metrics().unwrap().side_lengths;
            let mut after_sides = trace.final_polygon.metrics().unwrap().side_lengths;
            before_sides.sort_by(|a, b| a.partial_cmp(b).unwrap());
            after_sides.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in before_sides.iter().zip(&after_sides) {
                stats.worst_side_multiset_gap = stats.worst_side_multiset_gap.max((a - b).abs());
            }
        }
    }
    stats
}

fn criterion_flip_suite(cfg: &AcceptanceConfig) -> (bool, String) {
    let stats = run_flip_suite(cfg);

    // Dart fixture: one flip, gain 4, reflected vertex (50/13, 29/13).
    let trace = convexify::convexify(&dart(), FlipPolicy::FirstPocket, 1000).unwrap();
    let reflected = trace.steps[0].polygon_after.vertices()[2];
    let dart_ok = trace.steps.len() == 1
        && (trace.tau - 4.0).abs() <= 1e-12
        && (reflected.x - 50.0 / 13.0).abs() <= 1e-12
        && (reflected.y - 29.0 / 13.0).abs() <= 1e-12;

    let pass = stats.all_complete
        && stats.all_convex
        && stats.all_positive_gains
        && stats.worst_perimeter_drift <= 1e-12
        && stats.worst_side_multiset_gap <= 1e-9
        && dart_ok;
    (
        pass,
        format!(
            "{} polygons, max {} flips; worst per-step perimeter drift {:.1e} (tol 1e-12); worst side-multiset gap {:.1e} (tol 1e-9); dart fixture {}",
            stats.polygons,
            stats.max_steps_used,
            stats.worst_perimeter_drift,
            stats.worst_side_multiset_gap,
            if dart_ok { "ok" } else { "FAILED" }
        ),
    )
}

fn criterion_deficit_bookkeeping(cfg: &AcceptanceConfig) -> (bool, String) {
    let mut worst = 0.0f64;
    let mut ok = true;
    for n in 4..=cfg.max_n(12) {
        let seed = derive_seed(1006, n as u64);
        for index in 0..cfg.count(200) as u64 {
            let polygon = corpus_polygon(n, seed, index, DEFAULT_EPS);
            let m = polygon.metrics().unwrap();
            let trace = match convexify::convexify(&polygon, FlipPolicy::FirstPocket, 1000) {
                Ok(trace) => trace,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
            let mc = trace.final_polygon.metrics().unwrap();
            let gap = (m.delta - (mc.delta + m.deficit_coefficient * trace.tau)).abs();
            let scaled = gap / (m.perimeter * m.perimeter);
            worst = worst.max(scaled);
        }
    }

    // Dart fixture with oracle values computed here, not asserted a priori:
    // L = 6 + √5 + √13, δ(P) = L² − 64, δ(P_c) = L² − 128, c₄·τ = 64.
    let d = dart();
    let m = d.metrics().unwrap();
    let trace = convexify::convexify(&d, FlipPolicy::FirstPocket, 1000).unwrap();
    let mc = trace.final_polygon.metrics().unwrap();
    let l = 6.0 + 5.0f64.sqrt() + 13.0f64.sqrt();
    let dart_ok = (m.delta - (l * l - 64.0)).abs() <= 1e-9
        && (mc.delta - (l * l - 128.0)).abs() <= 1e-9
        && (m.delta - (mc.delta + 64.0)).abs() <= 1e-9;

    (
        ok && worst <= 1e-9 && dart_ok,
        format!(
            "worst |δ(P) − δ(P_c) − c_n·τ| / L² = {worst:.1e} (tol 1e-9); dart fixture {}",
            if dart_ok { "ok" } else { "FAILED" }
        ),
    )
}

fn criterion_radial_bonnesen(cfg: &AcceptanceConfig) -> (bool, String) {
    let mut worst_excess = f64::NEG_INFINITY;
    for n in 3..=cfg.max_n(10) {
        let nf = n as f64;
        let coeff = 8.0 * nf * nf * (PI / nf).sin().powi(2);
        for index in 0..cfg.count(1000) as u64 {
            let polygon = corpus_polygon(n, derive_seed(1008, n as u64), index, DEFAULT_EPS);
            let m = polygon.metrics().unwrap();
            let lhs = coeff * m.sigma_r2;
            let rhs = nf * m.sum_squared_sides - m.deficit_coefficient * m.area;
            let excess = (lhs - rhs) / (m.perimeter * m.perimeter);
            worst_excess = worst_excess.max(excess);
        }
    }
    (
        worst_excess <= 1e-9,
        format!("worst (8n²sin²(π/n)σ_r² − (nS − c_nF))/L² = {worst_excess:.1e} (tol 1e-9)"),
    )
}

fn criterion_empirical_theorem(cfg: &AcceptanceConfig) -> (bool, String) {
    let restarts = if cfg.quick { 12 } else { 32 };
    let mut ok = true;
    let mut worst_slack = f64::INFINITY;
    let mut constants = Vec::new();
    for n in 4..=cfg.max_n(12) {
        let estimate =
            match manifold::estimate_ratio_sup(n, restarts, derive_seed(1009, n as u64), 1e-3) {
                Ok(e) => e,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
        let c = match manifold::combine_constants(n, estimate.sup_ratio) {
            Ok(c) => c,
            Err(_) => {
                ok = false;
                continue;
            }
        };
        constants.push((n, c.c_theorem));
        let seed = derive_seed(1006, n as u64);
        for index in 0..cfg.count(200) as u64 {
            let polygon = corpus_polygon(n, seed, index, DEFAULT_EPS);
            let m = polygon.metrics().unwrap();
            let trace = match convexify::convexify(&polygon, FlipPolicy::FirstPocket, 1000) {
                Ok(trace) => trace,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
            let slack_budget = 1e-9 * m.perimeter * m.perimeter;
            let slack = c.c_theorem * m.delta + slack_budget - (trace.tau + m.variation);
            worst_slack = worst_slack.min(slack);
            if slack < 0.0 {
                ok = false;
            }
            // Corollary for convex polygons, applied to the convexification
            // (and to the input itself when it is already convex).
            let mc = trace.final_polygon.metrics().unwrap();
            let convex_slack = c.c_theorem * mc.delta
                + 1e-9 * mc.perimeter * mc.perimeter
                - (mc.sigma_s2 + mc.sigma_r2);
            worst_slack = worst_slack.min(convex_slack);
            if convex_slack < 0.0 {
                ok = false;
            }
        }
    }
    let c_range = constants
        .iter()
        .map(|(n, c)| format!("C({n})={c:.3}"))
        .collect::<Vec<_>>()
        .join(", ");
    (
        ok,
        format!("τ+v ≤ C_theorem·δ with {c_range}; worst slack {worst_slack:.2e}"),
    )
}

fn criterion_sharpness_scaling(cfg: &AcceptanceConfig) -> (bool, String) {
    let _ = cfg;
    let epsilons = [1e-1, 1e-2, 1e-3, 1e-4];
    let mut ok = true;
    let mut worst_final_err = 0.0f64;
    let mut worst_order = f64::INFINITY;
    let mut worst_ratio_gap = 0.0f64;
    for n in [4usize, 6, 8] {
        let bundle = spectral::build_bundle(n);
        let basis = manifold::tangent_basis_at_star(n);
        let f_orig_hess = &bundle.m_mat * (2.0 * n as f64);
        let star = AngularRadial::z_star(n).to_vector();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(1010, n as u64));
        for _ in 0..10 {
            let coeffs = DVector::from_fn(basis.ncols(), |_, _| rng.random_range(-1.0..1.0));
            let w = (&basis * coeffs).normalize();
            let target_f = 0.5 * w.dot(&(&f_orig_hess * &w));
            let target_g = 0.5 * w.dot(&(&bundle.g_hess * &w));
            let mut errs = [0.0f64; 4];
            for (j, &eps) in epsilons.iter().enumerate() {
                let point = AngularRadial::from_vector(&(&star + w.scale(eps)));
                let qf = manifold::f_eval(&point) / (eps * eps);
                let qg = manifold::g_eval(&point) / (eps * eps);
                errs[j] = ((qf - target_f) / target_f.abs().max(1e-6))
                    .abs()
                    .max(((qg - target_g) / target_g.abs().max(1e-6)).abs());
            }
            // Relative error must fall with observed order ≥ 1 per decade
            // (10% measurement slack) until it reaches the round-off floor.
            for j in 0..3 {
                if errs[j] > 1e-7 {
                    let order = (errs[j] / errs[j + 1].max(1e-12)).log10();
                    worst_order = worst_order.min(order);
                    if order < 0.9 {
                        ok = false;
                    }
                } else if errs[j + 1] > errs[j] + 1e-8 {
                    ok = false;
                }
            }
            if errs[3] >= errs[0] && errs[0] > 1e-8 {
                ok = false;
            }
            worst_final_err = worst_final_err.max(errs[3]);
        }

        // Along the top generalized eigendirection the direct quotient must
        // approach the Hessian limit; random directions converge to their own
        // (smaller) direction-dependent limits.
        let a = basis.transpose() * &f_orig_hess * &basis;
        let b = basis.transpose() * &bundle.g_hess * &basis;
        let (limit, top) = linalg::generalized_symmetric_max_eigenpair(&a, &b);
        let w_top = (&basis * top).normalize();
        let eps = 1e-4;
        let point = AngularRadial::from_vector(&(&star + w_top.scale(eps)));
        let ratio = manifold::f_eval(&point) / manifold::g_eval(&point);
        let gap = (ratio - limit).abs() / limit;
        worst_ratio_gap = worst_ratio_gap.max(gap);
        if gap > 0.1 {
            ok = false;
        }
    }
    (
        ok,
        format!(
            "quadratic-form convergence with per-decade order >= {worst_order:.2}; worst relative error at ε=1e-4 is {worst_final_err:.1e}; top-direction ratio within {worst_ratio_gap:.1e} of the Hessian limit (tol 0.1)"
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    // The full suite lives in the dedicated integration-test target; this is
    // a smoke check that the quick configuration caps its bounds.
    #[test]
    fn quick_config_caps_bounds() {
        let quick = AcceptanceConfig::quick();
        assert_eq!(quick.max_n(64), 16);
        assert_eq!(quick.count(1000), 50);
        let full = AcceptanceConfig::full();
        assert_eq!(full.max_n(64), 64);
        assert_eq!(full.count(1000), 1000);
    }
}
