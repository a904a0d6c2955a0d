//! Circulant matrices and their explicit spectra.
//!
//! A circulant matrix is determined by its first row; every following row is
//! the previous one shifted right by one slot. Its eigenvalues are the
//! evaluations of the generator at the n-th roots of unity,
//! `ψ_k = Σⱼ aⱼ·ω_kʲ` with `ω_k = e^{2πik/n}`, and all circulants of one size
//! share the eigenvectors `u_k = (1, ω_k, ω_k², …)`. For *real symmetric*
//! circulants the complex pairs combine into a real orthogonal eigenbasis of
//! cosine/sine vectors, which is what the spectral verifier consumes.

use nalgebra::DVector;
use num_complex::Complex64;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CirculantError {
    #[error("vector length {got} does not match matrix size {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("circulant generator must be non-empty")]
    EmptyGenerator,
}

/// Circulant matrix stored by its generator (first row).
#[derive(Debug, Clone)]
pub struct CirculantMatrix {
    generator: Vec<Complex64>,
}

impl CirculantMatrix {
    pub fn new(generator: Vec<Complex64>) -> Result<Self, CirculantError> {
        if generator.is_empty() {
            return Err(CirculantError::EmptyGenerator);
        }
        Ok(CirculantMatrix { generator })
    }

    pub fn from_real(generator: &[f64]) -> Result<Self, CirculantError> {
        Self::new(generator.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.generator.len()
    }

    pub fn generator(&self) -> &[Complex64] {
        &self.generator
    }

    /// Entry `(i, j)`; row `i` is the generator shifted right `i` times.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let n = self.n();
        debug_assert!(i < n && j < n);
        self.generator[(j + n - i) % n]
    }

    /// `ψ_k = Σⱼ aⱼ·ω_kʲ` for `k = 0..n−1`.
    ///
    /// Direct O(n²) evaluation; the angle `2πkj/n` is reduced mod `n` before
    /// the trig call so large indices lose no accuracy.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let n = self.n();
        (0..n)
            .map(|k| {
                let mut sum = Complex64::new(0.0, 0.0);
                for (j, a) in self.generator.iter().enumerate() {
                    let angle = TAU * ((k * j) % n) as f64 / n as f64;
                    sum += a * Complex64::new(angle.cos(), angle.sin());
                }
                sum
            })
            .collect()
    }

    /// Matrix–vector product of the materialized circulant.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>, CirculantError> {
        let n = self.n();
        if v.len() != n {
            return Err(CirculantError::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        Ok((0..n)
            .map(|i| {
                let mut sum = Complex64::new(0.0, 0.0);
                for (j, &vj) in v.iter().enumerate() {
                    sum += self.generator[(j + n - i) % n] * vj;
                }
                sum
            })
            .collect())
    }

    /// Real matrix–vector product; requires a real generator.
    pub fn apply_real(&self, v: &[f64]) -> Result<Vec<f64>, CirculantError> {
        let complex: Vec<Complex64> = v.iter().map(|&t| Complex64::new(t, 0.0)).collect();
        Ok(self.apply(&complex)?.into_iter().map(|c| c.re).collect())
    }

    /// True if every generator entry is real (imaginary part within `tol`).
    pub fn is_real(&self, tol: f64) -> bool {
        self.generator.iter().all(|a| a.im.abs() <= tol)
    }

    /// True if the generator satisfies `aⱼ = a_{n−j}` within `tol`, which is
    /// exactly the symmetry of the materialized matrix.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.n();
        (1..n).all(|j| (self.generator[j] - self.generator[n - j]).norm() <= tol)
    }

    /// Materialized matrix as CSV, for debugging; complex entries print as
    /// `re+imi`.
    pub fn to_csv(&self) -> String {
        let n = self.n();
        let mut out = String::new();
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| {
                    let e = self.entry(i, j);
                    if e.im == 0.0 {
                        format!("{}", e.re)
                    } else {
                        format!("{}{}{}i", e.re, if e.im < 0.0 { "" } else { "+" }, e.im)
                    }
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// The real orthogonal eigenbasis shared by all real symmetric circulants of
/// size `n`: the all-ones vector, then alternating cosine/sine vectors, and
/// for even `n` the alternating ±1 vector.
#[derive(Debug, Clone)]
pub struct RealSymmetricEigenbasis {
    n: usize,
    vectors: Vec<DVector<f64>>,
    squared_norms: Vec<f64>,
}

impl RealSymmetricEigenbasis {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Basis vector `v_k`, `k = 0..n−1`.
    pub fn vector(&self, k: usize) -> &DVector<f64> {
        &self.vectors[k]
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// `|v_k|²`: `n` for the all-ones (and, for even `n`, the alternating)
    /// vector, `n/2` for every cosine/sine pair.
    pub fn squared_norm(&self, k: usize) -> f64 {
        self.squared_norms[k]
    }

    /// Index of the eigenvalue `ψ` that `v_k` belongs to: `⌈k/2⌉`.
    pub fn eigenvalue_index(k: usize) -> usize {
        k.div_ceil(2)
    }
}

/// Builds the shared eigenbasis for size `n ≥ 3`.
pub fn real_symmetric_eigenbasis(n: usize) -> RealSymmetricEigenbasis {
    assert!(n >= 3, "eigenbasis needs n >= 3");
    let mut vectors = Vec::with_capacity(n);
    vectors.push(DVector::from_element(n, 1.0));
    let mut l = 1;
    while vectors.len() < n {
        let cos_vec = DVector::from_fn(n, |j, _| (TAU * ((l * j) % n) as f64 / n as f64).cos());
        vectors.push(cos_vec);
        if vectors.len() < n {
            let sin_vec =
                DVector::from_fn(n, |j, _| (TAU * ((l * j) % n) as f64 / n as f64).sin());
            vectors.push(sin_vec);
        }
        l += 1;
    }
    let squared_norms = vectors.iter().map(|v| v.norm_squared()).collect();
    RealSymmetricEigenbasis {
        n,
        vectors,
        squared_norms,
    }
}
