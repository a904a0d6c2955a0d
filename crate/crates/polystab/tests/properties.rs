//! Property tests for the geometric invariants.

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use polystab::convexify::{self, FlipPolicy};
use polystab::corpus::{corpus_polygon, derive_seed};
use polystab::manifold;
use polystab::polygon::{Point2, Polygon, DEFAULT_EPS};

fn rotate_translate(p: &Polygon, angle: f64, tx: f64, ty: f64) -> Polygon {
    let (s, c) = angle.sin_cos();
    let vertices = p
        .vertices()
        .iter()
        .map(|v| Point2::new(c * v.x - s * v.y + tx, s * v.x + c * v.y + ty))
        .collect();
    Polygon::new(vertices, p.eps()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metrics_invariant_under_rigid_motion(
        n in 3usize..=10,
        seed in 0u64..1000,
        angle in 0.0..TAU,
        tx in -5.0..5.0,
        ty in -5.0..5.0,
    ) {
        let p = corpus_polygon(n, seed, 0, DEFAULT_EPS);
        let q = rotate_translate(&p, angle, tx, ty);
        let mp = p.metrics().unwrap();
        let mq = q.metrics().unwrap();
        let scale = mp.perimeter * mp.perimeter;
        prop_assert!((mp.perimeter - mq.perimeter).abs() <= 1e-12 * scale);
        prop_assert!((mp.sum_squared_sides - mq.sum_squared_sides).abs() <= 1e-12 * scale);
        prop_assert!((mp.area - mq.area).abs() <= 1e-12 * scale);
        prop_assert!((mp.delta - mq.delta).abs() <= 1e-12 * scale);
        prop_assert!((mp.sigma_s2 - mq.sigma_s2).abs() <= 1e-12 * scale);
        prop_assert!((mp.sigma_r2 - mq.sigma_r2).abs() <= 1e-12 * scale);
    }

    #[test]
    fn side_variance_identity(n in 3usize..=12, seed in 0u64..1000) {
        // n²σ_s² = nS − L².
        let m = corpus_polygon(n, seed, 1, DEFAULT_EPS).metrics().unwrap();
        let nf = n as f64;
        let lhs = nf * nf * m.sigma_s2;
        let rhs = nf * m.sum_squared_sides - m.perimeter * m.perimeter;
        let scale = (m.perimeter * m.perimeter).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn deficit_nonnegative_and_bonnesen(n in 3usize..=10, seed in 0u64..1000) {
        let m = corpus_polygon(n, seed, 2, DEFAULT_EPS).metrics().unwrap();
        let nf = n as f64;
        let slack = 1e-9 * m.perimeter * m.perimeter;
        prop_assert!(m.delta >= -slack);
        prop_assert!(m.sigma_s2 >= -1e-12 && m.sigma_r2 >= -1e-12);
        let lhs = 8.0 * nf * nf * (PI / nf).sin().powi(2) * m.sigma_r2;
        let rhs = nf * m.sum_squared_sides - m.deficit_coefficient * m.area;
        prop_assert!(lhs <= rhs + slack);
    }

    #[test]
    fn angular_radial_round_trip(n in 4usize..=12, seed in 0u64..500) {
        // Points on the manifold have their vertex centroid at the origin, so
        // the rebuilt polygon reproduces the coordinates directly.
        let z = manifold::sample_m(n, derive_seed(7777, seed), 0.4).unwrap();
        let p = Polygon::from_angular_radial(&z, DEFAULT_EPS).unwrap();
        let z2 = p.to_angular_radial().unwrap();
        for i in 0..n {
            prop_assert!((z.x[i] - z2.x[i]).abs() <= 1e-9 * (1.0 + z.x[i].abs()));
            prop_assert!((z.r[i] - z2.r[i]).abs() <= 1e-9 * (1.0 + z.r[i].abs()));
        }
    }

    #[test]
    fn f_and_g_match_the_polygon_route(n in 4usize..=12, seed in 0u64..500) {
        // Evaluating f and g in angle–radius coordinates agrees with the
        // side/area computation on the rebuilt polygon.
        let z = manifold::sample_m(n, derive_seed(2121, seed), 0.35).unwrap();
        let p = Polygon::from_angular_radial(&z, DEFAULT_EPS).unwrap();
        let m = p.metrics().unwrap();
        let nf = n as f64;
        let f_poly = nf * m.sum_squared_sides - m.deficit_coefficient * m.area;
        let scale = (m.perimeter * m.perimeter).max(1.0);
        prop_assert!((manifold::f_eval(&z) - f_poly).abs() <= 1e-10 * scale);
        prop_assert!((manifold::g_eval(&z) - m.delta).abs() <= 1e-10 * scale);
    }

    #[test]
    fn flips_preserve_perimeter_and_grow_area(n in 4usize..=10, seed in 0u64..300) {
        let p = corpus_polygon(n, seed, 3, DEFAULT_EPS);
        let before = p.metrics().unwrap();
        let trace = convexify::convexify(&p, FlipPolicy::FirstPocket, 1000).unwrap();
        prop_assert!(trace.complete);
        prop_assert!(trace.final_polygon.is_convex());
        let after = trace.final_polygon.metrics().unwrap();
        prop_assert!((after.perimeter - before.perimeter).abs() <= 1e-11 * before.perimeter);
        for step in &trace.steps {
            prop_assert!(step.tau_i > 0.0);
            // Each reflection doubles the pocket region's contribution.
            prop_assert!((step.tau_i - 2.0 * step.pocket.area).abs() <= 1e-9 * step.tau_i);
        }
        // For simple polygons the convexification nests the input, so the
        // asymmetry equals the total gain.
        prop_assert!((trace.alpha_c - trace.tau).abs() <= 1e-9 * trace.tau.max(1e-12));
        // δ(P) = δ(P_c) + c_n·τ along the trace.
        let gap = (before.delta - (after.delta + before.deficit_coefficient * trace.tau)).abs();
        prop_assert!(gap <= 1e-9 * before.perimeter * before.perimeter);
    }
}

#[test]
fn regular_polygons_are_the_equality_case() {
    for n in 3..=20 {
        let pts: Vec<Point2> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                Point2::new(1.3 * t.cos(), 1.3 * t.sin())
            })
            .collect();
        let m = Polygon::new(pts, DEFAULT_EPS).unwrap().metrics().unwrap();
        let slack = 1e-9 * m.perimeter * m.perimeter;
        assert!(m.delta.abs() <= slack, "n={n}: delta = {}", m.delta);

        // A visible perturbation moves the deficit strictly above the slack.
        let mut pts: Vec<Point2> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                Point2::new(1.3 * t.cos(), 1.3 * t.sin())
            })
            .collect();
        pts[0].x += 0.05;
        let m = Polygon::new(pts, DEFAULT_EPS).unwrap().metrics().unwrap();
        assert!(m.delta > 1e-9 * m.perimeter * m.perimeter, "n={n}");
    }
}

#[test]
fn sampled_manifold_points_respect_estimated_ratio() {
    // No sampled point of the manifold may beat the estimated supremum of
    // f/g by more than the stated slack.
    let n = 5;
    let estimate = manifold::estimate_ratio_sup(n, 24, 42, 1e-3).unwrap();
    for i in 0..200 {
        let z = manifold::sample_m(n, derive_seed(5150, i), 0.6).unwrap();
        let g = manifold::g_eval(&z);
        if g < 1e-10 {
            continue;
        }
        let f = manifold::f_eval(&z);
        assert!(
            f <= estimate.sup_ratio * g + 1e-9 * (1.0 + f.abs()),
            "sample {i}: f/g = {} exceeds sup {}",
            f / g,
            estimate.sup_ratio
        );
    }
}
