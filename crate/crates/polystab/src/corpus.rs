//! Seeded generation of random simple polygons for sweeps and tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::polygon::{Point2, Polygon};

/// Stateless seed derivation (splitmix-style), so parallel sweeps can hand
/// every item its own stream deterministically.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Random simple polygon: vertices are placed at increasing angles around the
/// origin with jittered gaps and radii, which keeps the boundary simple by
/// construction while leaving plenty of reflex vertices for the flip suite.
pub fn random_star_polygon(n: usize, rng: &mut ChaCha8Rng, eps: f64) -> Polygon {
    assert!(n >= 3);
    // Gaps in [0.4, 1.0] keep every normalized gap below π for n ≥ 4; any
    // three non-collinear points are a simple triangle regardless.
    let gaps: Vec<f64> = (0..n).map(|_| rng.random_range(0.4..1.0)).collect();
    let total: f64 = gaps.iter().sum();
    let radii: Vec<f64> = (0..n).map(|_| rng.random_range(0.35..1.65)).collect();
    let mut theta = 0.0f64;
    let vertices: Vec<Point2> = (0..n)
        .map(|i| {
            let p = Point2::new(radii[i] * theta.cos(), radii[i] * theta.sin());
            theta += gaps[i] / total * std::f64::consts::TAU;
            p
        })
        .collect();
    Polygon::new(vertices, eps).expect("star construction yields a valid polygon")
}

/// The `index`-th polygon of the corpus identified by `(n, seed)`.
pub fn corpus_polygon(n: usize, seed: u64, index: u64, eps: f64) -> Polygon {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, index));
    random_star_polygon(n, &mut rng, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::DEFAULT_EPS;

    #[test]
    fn generated_polygons_are_simple_and_reproducible() {
        for n in [3usize, 4, 7, 12] {
            for index in 0..20 {
                let p = corpus_polygon(n, 99, index, DEFAULT_EPS);
                assert!(p.is_simple(), "n={n}, index={index}");
                assert_eq!(p.n(), n);
                let again = corpus_polygon(n, 99, index, DEFAULT_EPS);
                assert_eq!(p.vertices(), again.vertices());
            }
        }
    }

    #[test]
    fn corpus_contains_nonconvex_members() {
        let nonconvex = (0..50)
            .filter(|&i| !corpus_polygon(8, 123, i, DEFAULT_EPS).is_convex())
            .count();
        assert!(nonconvex > 10, "only {nonconvex} non-convex polygons");
    }
}
