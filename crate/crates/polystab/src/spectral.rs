//! The Hessian block matrices at the regular configuration and the spectral
//! identities that compare them.
//!
//! At `z_*` the Hessian of the rescaled `f` is `cos(π/n)·M` with
//! `M = [[I, B], [Bᵀ, K]]`, and on the mean-zero subspace the Hessian of `g`
//! agrees with `2n·sin²(π/n)·N`, `N = [[I, B], [Bᵀ, D]]`. The unimodular
//! transform `Q = [[I, −B], [0, I]]` block-diagonalizes both:
//! `QᵀMQ = diag(I, K − BᵀB)` and `QᵀNQ = diag(I, D − BᵀB)`. The two corner
//! blocks are circulant and proportional to one shared matrix `H`, which
//! yields closed-form eigenvalues
//! `λ_k = 4·sin(π(k−1)/n)·sin(π(k+1)/n)/cos²(π/n)` and `μ_k = λ_k/sin²(π/n)`.
//! Everything here is verified numerically: the identities elementwise, the
//! quadratic-form inequality `⟨Uz,z⟩ ≤ ⟨Vz,z⟩` on sampled mean-zero vectors,
//! and the positivity of `U` on the transformed tangent subspace.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circulant;
use crate::linalg;
use crate::manifold::{self, AngularRadial};

/// Default tolerance for the exact linear-algebra identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Default tolerance for the sampled quadratic-form inequality.
pub const INEQUALITY_TOL: f64 = 1e-12;
/// Finite-difference gradient tolerance at the default step.
pub const FD_GRADIENT_TOL: f64 = 1e-6;
/// Finite-difference Hessian tolerance at the default step.
pub const FD_HESSIAN_TOL: f64 = 1e-5;
/// Default central-difference step.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("eigenvalue index {k} out of range for size {n}")]
    IndexOutOfRange { k: usize, n: usize },
    #[error("identity `{identity}` violated: error {error:.3e} exceeds tolerance {tol:.3e}")]
    IdentityViolated {
        identity: &'static str,
        error: f64,
        tol: f64,
    },
    #[error("quadratic-form inequality violated on {violations} samples (worst margin {max_margin:.3e})")]
    InequalityViolated { violations: usize, max_margin: f64 },
    #[error("Rayleigh quotient on the transformed tangent space is not positive: {value:.3e}")]
    NonPositive { value: f64 },
    #[error("derivative check `{what}` failed: error {error:.3e} exceeds tolerance {tol:.3e}")]
    DerivativeMismatch {
        what: String,
        error: f64,
        tol: f64,
    },
}

/// Every matrix and spectral quantity attached to one size `n`.
#[derive(Debug, Clone)]
pub struct SpectralBundle {
    pub n: usize,
    /// Cross-coupling block: `tan(π/n)` on the diagonal and superdiagonal
    /// (cyclically).
    pub b_mat: DMatrix<f64>,
    /// Radius block of the rescaled-f Hessian: circulant `(2, −1, 0, …, −1)`.
    pub k_mat: DMatrix<f64>,
    /// Radius block of the reduced g form: circulant with `2/tan²(π/n)` on the
    /// diagonal and `−2 − 1/tan²(π/n)` beside it.
    pub d_mat: DMatrix<f64>,
    /// Shared circulant core: `2·cos(2π/n)` on the diagonal, `−1` beside it.
    pub h_mat: DMatrix<f64>,
    /// Hessian of the rescaled `f` at `z_*`; equals `cos(π/n)·M`.
    pub f_hess: DMatrix<f64>,
    /// Hessian of `g` at `z_*`.
    pub g_hess: DMatrix<f64>,
    /// `[[I, B], [Bᵀ, K]]`.
    pub m_mat: DMatrix<f64>,
    /// `[[I, B], [Bᵀ, D]]`.
    pub n_mat: DMatrix<f64>,
    /// `[[I, −B], [0, I]]`, determinant one.
    pub q_mat: DMatrix<f64>,
    /// `QᵀMQ`, block-diagonal up to round-off.
    pub u_mat: DMatrix<f64>,
    /// `QᵀNQ`.
    pub v_mat: DMatrix<f64>,
    /// Closed-form eigenvalues of `K − BᵀB`.
    pub lambda: Vec<f64>,
    /// Closed-form eigenvalues of `D − BᵀB`; `μ_k = λ_k/sin²(π/n)`.
    pub mu: Vec<f64>,
    /// `(1 + 1/(4n·sin²(π/n)))⁻¹`.
    pub c_tilde: f64,
    /// Squared norms `|f_k|²` of the `2n` product-basis eigenvectors of `U`:
    /// standard basis vectors on the first block, the shared circulant
    /// eigenbasis on the second.
    pub eigvec_norms: Vec<f64>,
}

fn circulant_from_triple(n: usize, diag: f64, off: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        let dist = (i as isize - j as isize).unsigned_abs().min(n - (i as isize - j as isize).unsigned_abs());
        if dist == 0 {
            diag
        } else if dist == 1 {
            off
        } else {
            0.0
        }
    })
}

fn assemble_blocks(
    tl: &DMatrix<f64>,
    tr: &DMatrix<f64>,
    bl: &DMatrix<f64>,
    br: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n = tl.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => tl[(i, j)],
        (true, false) => tr[(i, j - n)],
        (false, true) => bl[(i - n, j)],
        (false, false) => br[(i - n, j - n)],
    })
}

/// Builds the full bundle for `n ≥ 3` from the closed forms.
pub fn build_bundle(n: usize) -> SpectralBundle {
    assert!(n >= 3, "bundle needs n >= 3");
    let nf = n as f64;
    let t = (PI / nf).tan();
    let c = (PI / nf).cos();
    let s = (PI / nf).sin();

    let b_mat = DMatrix::from_fn(n, n, |i, j| {
        if j == i || j == (i + 1) % n {
            t
        } else {
            0.0
        }
    });
    let k_mat = circulant_from_triple(n, 2.0, -1.0);
    let d_mat = circulant_from_triple(n, 2.0 / (t * t), -2.0 - 1.0 / (t * t));
    let h_mat = circulant_from_triple(n, 2.0 * (2.0 * PI / nf).cos(), -1.0);

    let identity = DMatrix::identity(n, n);
    let m_mat = assemble_blocks(&identity, &b_mat, &b_mat.transpose(), &k_mat);
    let n_mat = assemble_blocks(&identity, &b_mat, &b_mat.transpose(), &d_mat);
    let f_hess = &m_mat * c;

    // Hessian of g entrywise: the angle block is a rank-one-plus-diagonal
    // pattern, the radius block distinguishes cyclic neighbors, and the
    // cross block adds an extra term on the two slots each angle touches.
    let gxx = DMatrix::from_fn(n, n, |i, j| {
        2.0 * c * c + if i == j { 2.0 * nf * s * s } else { 0.0 }
    });
    let grr = DMatrix::from_fn(n, n, |i, j| {
        let dist = (i as isize - j as isize).unsigned_abs().min(n - (i as isize - j as isize).unsigned_abs());
        if dist == 0 {
            8.0 * s * s + 4.0 * nf * c * c
        } else if dist == 1 {
            (8.0 - 4.0 * nf) * s * s - 2.0 * nf * c * c
        } else {
            8.0 * s * s
        }
    });
    let gxr = DMatrix::from_fn(n, n, |i, j| {
        2.0 * (2.0 * PI / nf).sin() + if j == i || j == (i + 1) % n {
            2.0 * nf * s * s * t
        } else {
            0.0
        }
    });
    let g_hess = assemble_blocks(&gxx, &gxr, &gxr.transpose(), &grr);

    let q_mat = assemble_blocks(
        &identity,
        &(-&b_mat),
        &DMatrix::zeros(n, n),
        &identity,
    );
    let u_mat = q_mat.transpose() * &m_mat * &q_mat;
    let v_mat = q_mat.transpose() * &n_mat * &q_mat;

    let lambda: Vec<f64> = (0..n).map(|k| lambda_value(n, k)).collect();
    let mu: Vec<f64> = lambda.iter().map(|l| l / (s * s)).collect();
    let c_tilde = 1.0 / (1.0 + 1.0 / (4.0 * nf * s * s));

    let basis = circulant::real_symmetric_eigenbasis(n);
    let mut eigvec_norms = vec![1.0; n];
    eigvec_norms.extend((0..n).map(|k| basis.squared_norm(k)));

    SpectralBundle {
        n,
        b_mat,
        k_mat,
        d_mat,
        h_mat,
        f_hess,
        g_hess,
        m_mat,
        n_mat,
        q_mat,
        u_mat,
        v_mat,
        lambda,
        mu,
        c_tilde,
        eigvec_norms,
    }
}

fn lambda_value(n: usize, k: usize) -> f64 {
    let nf = n as f64;
    let kf = k as f64;
    4.0 * (PI * (kf - 1.0) / nf).sin() * (PI * (kf + 1.0) / nf).sin() / (PI / nf).cos().powi(2)
}

/// `λ_k = 4·sin(π(k−1)/n)·sin(π(k+1)/n)/cos²(π/n)`.
pub fn lambda_closed_form(n: usize, k: usize) -> Result<f64, SpectralError> {
    if k >= n {
        return Err(SpectralError::IndexOutOfRange { k, n });
    }
    Ok(lambda_value(n, k))
}

/// `μ_k = λ_k/sin²(π/n)`.
pub fn mu_closed_form(n: usize, k: usize) -> Result<f64, SpectralError> {
    Ok(lambda_closed_form(n, k)? / (PI / n as f64).sin().powi(2))
}

/// The positive lower bound on `⟨Uz,z⟩/Σα_k²` over the transformed tangent
/// space: `min{c̃_n, λ_{⌈(k−n−1)/2⌉}·|f_k|² for k = n+4..2n}`.
pub fn rayleigh_floor(bundle: &SpectralBundle) -> f64 {
    let n = bundle.n;
    let mut floor = bundle.c_tilde;
    for k in (n + 4)..=(2 * n) {
        let lam_idx = (k - n - 1).div_ceil(2);
        let value = bundle.lambda[lam_idx] * bundle.eigvec_norms[k - 1];
        floor = floor.min(value);
    }
    floor
}

/// Which subspace a projector targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SubspaceKind {
    /// `H₁`: both block means vanish.
    MeanZero,
    /// `H̃`: the image of the tangent space under the block transform.
    TransformedTangent,
}

/// Orthogonal projector onto a constraint-defined subspace of `R^{2n}`.
#[derive(Debug, Clone)]
pub struct SubspaceProjector {
    kind: SubspaceKind,
    n: usize,
    rows: DMatrix<f64>,
    basis: DMatrix<f64>,
    projector: DMatrix<f64>,
}

impl SubspaceProjector {
    /// `H₁ = {(ζ; η) : Σζ = Ση = 0}`.
    pub fn h1(n: usize) -> Self {
        let mut rows = DMatrix::zeros(2, 2 * n);
        for k in 0..n {
            rows[(0, k)] = 1.0;
            rows[(1, n + k)] = 1.0;
        }
        Self::from_rows(SubspaceKind::MeanZero, n, rows)
    }

    /// `H̃`: mean-zero in both blocks plus the two transformed centroid rows.
    pub fn h_tilde(n: usize) -> Self {
        let nf = n as f64;
        let s = (PI / nf).sin();
        let mut rows = DMatrix::zeros(4, 2 * n);
        for k in 0..n {
            rows[(0, k)] = 1.0;
            rows[(1, n + k)] = 1.0;
            rows[(2, k)] = -(PI * (2.0 * k as f64 + 1.0) / nf).cos() / (2.0 * s);
            rows[(2, n + k)] = 2.0 * (2.0 * PI * k as f64 / nf).cos();
            rows[(3, k)] = -(PI * (2.0 * k as f64 + 1.0) / nf).sin() / (2.0 * s);
            rows[(3, n + k)] = 2.0 * (2.0 * PI * k as f64 / nf).sin();
        }
        Self::from_rows(SubspaceKind::TransformedTangent, n, rows)
    }

    fn from_rows(kind: SubspaceKind, n: usize, rows: DMatrix<f64>) -> Self {
        let basis = linalg::orthonormal_kernel_basis(&rows);
        let projector = linalg::kernel_projector(&rows);
        SubspaceProjector {
            kind,
            n,
            rows,
            basis,
            projector,
        }
    }

    pub fn kind(&self) -> SubspaceKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constraint_rows(&self) -> &DMatrix<f64> {
        &self.rows
    }

    /// Orthonormal basis of the subspace, one column per dimension.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.projector * v
    }
}

/// Removes the block means; the cheap exact projection onto `H₁`.
fn project_h1(v: &mut DVector<f64>, n: usize) {
    let mean_x: f64 = v.iter().take(n).sum::<f64>() / n as f64;
    let mean_r: f64 = v.iter().skip(n).sum::<f64>() / n as f64;
    for i in 0..n {
        v[i] -= mean_x;
        v[n + i] -= mean_r;
    }
}

fn quadratic_form(m: &DMatrix<f64>, z: &DVector<f64>) -> f64 {
    z.dot(&(m * z))
}

/// Elementwise errors of the matrix identities in one bundle.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub tol: f64,
    /// `max|(K − BᵀB) − H/cos²(π/n)|`.
    pub err_k_identity: f64,
    /// `max|(D − BᵀB) − H/(sin²·cos²)|`.
    pub err_d_identity: f64,
    /// `max|QᵀMQ − diag(I, K − BᵀB)|`.
    pub err_u_block_form: f64,
    /// `max|QᵀNQ − diag(I, D − BᵀB)|`.
    pub err_v_block_form: f64,
    /// Worst relative gap between `⟨Gz,z⟩` and `2n·sin²(π/n)·⟨Nz,z⟩` on
    /// sampled mean-zero unit vectors.
    pub err_g_form_on_h1: f64,
    /// `|det Q − 1|`.
    pub err_det_q: f64,
    pub pass: bool,
}

/// Checks every identity of the bundle against `tol`.
pub fn verify_identities(
    bundle: &SpectralBundle,
    tol: f64,
) -> Result<IdentityReport, SpectralError> {
    let n = bundle.n;
    let nf = n as f64;
    let c2 = (PI / nf).cos().powi(2);
    let s2 = (PI / nf).sin().powi(2);

    let k_minus = &bundle.k_mat - bundle.b_mat.transpose() * &bundle.b_mat;
    let d_minus = &bundle.d_mat - bundle.b_mat.transpose() * &bundle.b_mat;
    let err_k_identity = linalg::max_abs(&(&k_minus - &bundle.h_mat / c2));
    let err_d_identity = linalg::max_abs(&(&d_minus - &bundle.h_mat / (s2 * c2)));

    let zero = DMatrix::zeros(n, n);
    let identity = DMatrix::identity(n, n);
    let u_expected = assemble_blocks(&identity, &zero, &zero, &k_minus);
    let v_expected = assemble_blocks(&identity, &zero, &zero, &d_minus);
    let err_u_block_form = linalg::max_abs(&(&bundle.u_mat - u_expected));
    let err_v_block_form = linalg::max_abs(&(&bundle.v_mat - v_expected));

    let mut rng = ChaCha8Rng::seed_from_u64(0x7031_5ab1);
    let mut err_g_form_on_h1 = 0.0f64;
    for _ in 0..32 {
        let mut z = DVector::from_fn(2 * n, |_, _| rng.random_range(-1.0..1.0));
        project_h1(&mut z, n);
        let norm = z.norm();
        if norm < 1e-9 {
            continue;
        }
        z /= norm;
        let g_form = quadratic_form(&bundle.g_hess, &z);
        let n_form = 2.0 * nf * s2 * quadratic_form(&bundle.n_mat, &z);
        let err = (g_form - n_form).abs() / g_form.abs().max(1.0);
        err_g_form_on_h1 = err_g_form_on_h1.max(err);
    }

    let err_det_q = (bundle.q_mat.determinant() - 1.0).abs();

    let report = IdentityReport {
        n,
        tol,
        err_k_identity,
        err_d_identity,
        err_u_block_form,
        err_v_block_form,
        err_g_form_on_h1,
        err_det_q,
        pass: true,
    };
    let checks: [(&'static str, f64); 6] = [
        ("K - BtB = H/cos^2", err_k_identity),
        ("D - BtB = H/(sin^2 cos^2)", err_d_identity),
        ("QtMQ block-diagonal", err_u_block_form),
        ("QtNQ block-diagonal", err_v_block_form),
        ("<Gz,z> = 2n sin^2 <Nz,z> on H1", err_g_form_on_h1),
        ("det Q = 1", err_det_q),
    ];
    for (identity, error) in checks {
        if error.is_nan() || error > tol {
            return Err(SpectralError::IdentityViolated {
                identity,
                error,
                tol,
            });
        }
    }
    Ok(report)
}

/// Result of the sampled `⟨Uz,z⟩ ≤ ⟨Vz,z⟩` check on `H₁`.
#[derive(Debug, Clone, Serialize)]
pub struct UleVReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub violations: usize,
    /// Worst `(⟨Uz,z⟩ − ⟨Vz,z⟩)/|z|²` seen; negative when the inequality
    /// holds with margin.
    pub max_margin: f64,
    /// `μ_k ≥ λ_k` for `k = 1..n−1`, the spectral route to the same fact.
    pub spectral_ok: bool,
}

/// Samples random vectors, projects them onto `H₁`, and checks
/// `⟨Uz,z⟩ ≤ ⟨Vz,z⟩ + tol·|z|²`; also verifies `μ_k ≥ λ_k` spectrally.
pub fn check_u_le_v(
    bundle: &SpectralBundle,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<UleVReport, SpectralError> {
    let n = bundle.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut max_margin = f64::NEG_INFINITY;
    for _ in 0..samples {
        let mut z = DVector::from_fn(2 * n, |_, _| rng.random_range(-1.0..1.0));
        project_h1(&mut z, n);
        let norm_sq = z.norm_squared();
        if norm_sq < 1e-18 {
            continue;
        }
        let margin = (quadratic_form(&bundle.u_mat, &z) - quadratic_form(&bundle.v_mat, &z))
            / norm_sq;
        max_margin = max_margin.max(margin);
        if margin > tol {
            violations += 1;
        }
    }
    let spectral_ok = (1..n).all(|k| bundle.mu[k] >= bundle.lambda[k] - 1e-12);
    let report = UleVReport {
        n,
        samples,
        seed,
        tol,
        violations,
        max_margin,
        spectral_ok,
    };
    if violations > 0 || !spectral_ok {
        return Err(SpectralError::InequalityViolated {
            violations,
            max_margin,
        });
    }
    Ok(report)
}

/// Least Rayleigh quotient of `U` over the transformed tangent space,
/// computed exactly by restricting `U` to an orthonormal basis of `H̃`.
/// Must be positive; that is the strict-convexity condition.
pub fn min_rayleigh_u_on_htilde(bundle: &SpectralBundle) -> Result<f64, SpectralError> {
    let basis = SubspaceProjector::h_tilde(bundle.n).basis().clone();
    let restricted = basis.transpose() * &bundle.u_mat * &basis;
    let eigs = linalg::symmetric_eigenvalues_sorted(&restricted);
    let least = eigs[0];
    if least <= 0.0 {
        return Err(SpectralError::NonPositive { value: least });
    }
    Ok(least)
}

/// Finite-difference verification of the closed-form derivatives at `z_*`.
#[derive(Debug, Clone, Serialize)]
pub struct FdReport {
    pub n: usize,
    pub step: f64,
    pub f_at_star: f64,
    pub g_at_star: f64,
    pub max_grad_err_f: f64,
    pub max_grad_err_g: f64,
    pub max_hess_err_f: f64,
    pub max_hess_err_g: f64,
    /// Residual of the closed-form gradients against the span of the two
    /// all-ones block directions; a zero residual makes the first derivative
    /// vanish along anything preserving the two sums.
    pub span_residual_f: f64,
    pub span_residual_g: f64,
    pub pass: bool,
}

pub(crate) fn fd_gradient(
    phi: &dyn Fn(&DVector<f64>) -> f64,
    at: &DVector<f64>,
    h: f64,
) -> DVector<f64> {
    DVector::from_fn(at.len(), |i, _| {
        let mut plus = at.clone();
        let mut minus = at.clone();
        plus[i] += h;
        minus[i] -= h;
        (phi(&plus) - phi(&minus)) / (2.0 * h)
    })
}

/// `(4·H(h) − H(2h))/3`: Richardson extrapolation of the central
/// second-difference stencil.
fn fd_hessian_extrapolated(
    phi: &dyn Fn(&DVector<f64>) -> f64,
    at: &DVector<f64>,
    h: f64,
) -> DMatrix<f64> {
    let fine = fd_hessian(phi, at, h);
    let coarse = fd_hessian(phi, at, 2.0 * h);
    (fine * 4.0 - coarse) / 3.0
}

fn fd_hessian(phi: &dyn Fn(&DVector<f64>) -> f64, at: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let d = at.len();
    let center = phi(at);
    let mut hess = DMatrix::zeros(d, d);
    for i in 0..d {
        let mut plus = at.clone();
        let mut minus = at.clone();
        plus[i] += h;
        minus[i] -= h;
        hess[(i, i)] = (phi(&plus) - 2.0 * center + phi(&minus)) / (h * h);
        for j in (i + 1)..d {
            let mut pp = at.clone();
            let mut pm = at.clone();
            let mut mp = at.clone();
            let mut mm = at.clone();
            pp[i] += h;
            pp[j] += h;
            pm[i] += h;
            pm[j] -= h;
            mp[i] -= h;
            mp[j] += h;
            mm[i] -= h;
            mm[j] -= h;
            let value = (phi(&pp) - phi(&pm) - phi(&mp) + phi(&mm)) / (4.0 * h * h);
            hess[(i, j)] = value;
            hess[(j, i)] = value;
        }
    }
    hess
}

/// Residual norm of `grad` against `span{(1,…,1; 0,…,0), (0,…,0; 1,…,1)}`.
fn span_residual(grad: &DVector<f64>, n: usize) -> f64 {
    let mean_x: f64 = grad.iter().take(n).sum::<f64>() / n as f64;
    let mean_r: f64 = grad.iter().skip(n).sum::<f64>() / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        sum += (grad[i] - mean_x).powi(2) + (grad[n + i] - mean_r).powi(2);
    }
    sum.sqrt()
}

/// Central-difference check of the gradients and Hessians of the rescaled `f`
/// and of `g` at `z_*` against their closed forms, plus the vanishing of both
/// functions there.
///
/// `h` is the first-difference step. Second differences divide by `h²`, so
/// round-off in the O(1)-sized terms of `g` would swamp them at the same
/// step; they use the balanced step `h^{3/4}` (1e-5 → 1.8e-4, where the
/// cancellation and truncation branches cross) with Richardson extrapolation
/// on top to hold the `n³`-growth of the truncation term below tolerance
/// through `n = 32` and beyond.
pub fn gradient_and_hessian_fd_check(n: usize, h: f64) -> Result<FdReport, SpectralError> {
    assert!(n >= 3);
    let nf = n as f64;
    let h_hess = h.powf(0.75);
    let bundle = build_bundle(n);
    let star = AngularRadial::z_star(n).to_vector();
    let eval_f = |v: &DVector<f64>| manifold::f_rescaled_eval(&AngularRadial::from_vector(v));
    let eval_g = |v: &DVector<f64>| manifold::g_eval(&AngularRadial::from_vector(v));

    let f_at_star = eval_f(&star);
    let g_at_star = eval_g(&star);

    let closed_grad_f = DVector::from_fn(2 * n, |i, _| {
        if i < n {
            (PI / nf).sin()
        } else {
            0.0
        }
    });
    let closed_grad_g = DVector::from_fn(2 * n, |i, _| {
        if i < n {
            2.0 * nf * (PI / nf).tan()
        } else {
            0.0
        }
    });

    let grad_f = fd_gradient(&eval_f, &star, h);
    let grad_g = fd_gradient(&eval_g, &star, h);
    let max_grad_err_f = (&grad_f - &closed_grad_f).amax();
    let max_grad_err_g = (&grad_g - &closed_grad_g).amax();

    // Richardson extrapolation across a step doubling cancels the h² term of
    // the stencil; the fourth derivatives of g grow like n³, and without it
    // the truncation branch alone would cross the tolerance near n = 20.
    let hess_f = fd_hessian_extrapolated(&eval_f, &star, h_hess);
    let hess_g = fd_hessian_extrapolated(&eval_g, &star, h_hess);
    let max_hess_err_f = (&hess_f - &bundle.f_hess).amax();
    let max_hess_err_g = (&hess_g - &bundle.g_hess).amax();

    let span_residual_f = span_residual(&closed_grad_f, n);
    let span_residual_g = span_residual(&closed_grad_g, n);

    let report = FdReport {
        n,
        step: h,
        f_at_star,
        g_at_star,
        max_grad_err_f,
        max_grad_err_g,
        max_hess_err_f,
        max_hess_err_g,
        span_residual_f,
        span_residual_g,
        pass: true,
    };
    let checks: [(&str, f64, f64); 8] = [
        ("f(z_*) = 0", f_at_star.abs(), 1e-12),
        ("g(z_*) = 0", g_at_star.abs(), 1e-12),
        ("grad f", max_grad_err_f, FD_GRADIENT_TOL),
        ("grad g", max_grad_err_g, FD_GRADIENT_TOL),
        ("hess f", max_hess_err_f, FD_HESSIAN_TOL),
        ("hess g", max_hess_err_g, FD_HESSIAN_TOL),
        ("grad f span residual", span_residual_f, 1e-10),
        ("grad g span residual", span_residual_g, 1e-10),
    ];
    for (what, error, tol) in checks {
        if error.is_nan() || error > tol {
            return Err(SpectralError::DerivativeMismatch {
                what: what.to_string(),
                error,
                tol,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bundle_block_structure() {
        let bundle = build_bundle(4);
        // tan(π/4) = 1 sits on the diagonal and the cyclic superdiagonal.
        for i in 0..4 {
            for j in 0..4 {
                let expected = if j == i || j == (i + 1) % 4 { 1.0 } else { 0.0 };
                assert_relative_eq!(bundle.b_mat[(i, j)], expected, epsilon = 1e-14);
            }
        }
        // K row sums vanish for every n.
        for n in [3usize, 5, 9] {
            let b = build_bundle(n);
            for i in 0..n {
                assert!(b.k_mat.row(i).sum().abs() < 1e-14);
            }
        }
        // n = 3: the H diagonal is 2cos(2π/3) = −1.
        let b3 = build_bundle(3);
        for i in 0..3 {
            assert_relative_eq!(b3.h_mat[(i, i)], -1.0, epsilon = 1e-14);
        }
        // f_hess is cos(π/n)·M.
        let scaled = &bundle.m_mat * (PI / 4.0).cos();
        assert!(linalg::max_abs(&(&bundle.f_hess - scaled)) < 1e-14);
    }

    #[test]
    fn lambda_closed_form_examples() {
        // k = 1 vanishes identically.
        for n in 3..=16 {
            assert_eq!(lambda_closed_form(n, 1).unwrap(), 0.0);
        }
        // Dense eigensolver oracle values for n = 4.
        assert_relative_eq!(lambda_closed_form(4, 0).unwrap(), -4.0, max_relative = 1e-13);
        assert_relative_eq!(lambda_closed_form(4, 2).unwrap(), 4.0, max_relative = 1e-13);
        assert!(matches!(
            lambda_closed_form(4, 4),
            Err(SpectralError::IndexOutOfRange { k: 4, n: 4 })
        ));
        // λ₀ = −4tan²(π/n) is the single negative eigenvalue; all others are
        // nonnegative.
        for n in 3..=12 {
            let expected = -4.0 * (PI / n as f64).tan().powi(2);
            assert_relative_eq!(
                lambda_closed_form(n, 0).unwrap(),
                expected,
                max_relative = 1e-12
            );
            for k in 1..n {
                assert!(lambda_closed_form(n, k).unwrap() >= -1e-12);
            }
        }
    }

    #[test]
    fn lambda_matches_dense_spectrum() {
        for n in [3usize, 4, 7, 12] {
            let bundle = build_bundle(n);
            let k_minus = &bundle.k_mat - bundle.b_mat.transpose() * &bundle.b_mat;
            let dense = linalg::symmetric_eigenvalues_sorted(&k_minus);
            let mut closed = bundle.lambda.clone();
            closed.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in closed.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn c_tilde_value_for_n4() {
        let bundle = build_bundle(4);
        assert_relative_eq!(bundle.c_tilde, 8.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn identities_hold_and_fault_injection_is_caught() {
        for n in [3usize, 5, 16] {
            let bundle = build_bundle(n);
            let report = verify_identities(&bundle, IDENTITY_TOL).unwrap();
            assert!(report.pass);
        }

        let mut corrupted = build_bundle(6);
        corrupted.h_mat[(0, 0)] += 1e-3;
        assert!(matches!(
            verify_identities(&corrupted, IDENTITY_TOL),
            Err(SpectralError::IdentityViolated { .. })
        ));

        // Unreachable tolerance, the negative control.
        let bundle = build_bundle(6);
        assert!(verify_identities(&bundle, 1e-60).is_err());
    }

    #[test]
    fn u_le_v_sampled_and_on_eigen_directions() {
        let bundle = build_bundle(6);
        let report = check_u_le_v(&bundle, 10_000, 42, INEQUALITY_TOL).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.spectral_ok);

        // Pure ζ directions give equality: both forms reduce to |ζ|².
        let mut z = DVector::zeros(12);
        z[0] = 1.0;
        z[3] = -1.0;
        let qu = quadratic_form(&bundle.u_mat, &z);
        let qv = quadratic_form(&bundle.v_mat, &z);
        assert_relative_eq!(qu, qv, max_relative = 1e-12);
        assert_relative_eq!(qu, 2.0, max_relative = 1e-12);

        // First eigen-direction with a nonvanishing eigenvalue: the forms
        // scale by exactly 1/sin²(π/n). (The pair right below it sits in the
        // kernel, so both forms vanish there.)
        let basis = circulant::real_symmetric_eigenbasis(6);
        let mut z = DVector::zeros(12);
        for j in 0..6 {
            z[6 + j] = basis.vector(3)[j];
        }
        let qu = quadratic_form(&bundle.u_mat, &z);
        let qv = quadratic_form(&bundle.v_mat, &z);
        let expected = 1.0 / (PI / 6.0).sin().powi(2);
        assert_relative_eq!(qv / qu, expected, max_relative = 1e-10);
    }

    #[test]
    fn h1_is_invariant_under_q() {
        let bundle = build_bundle(7);
        let projector = SubspaceProjector::h1(7);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..8 {
            let raw = DVector::from_fn(14, |_, _| rng.random_range(-1.0..1.0));
            let z = projector.project(&raw);
            let qz = &bundle.q_mat * &z;
            let mut back = qz.clone();
            project_h1(&mut back, 7);
            assert!((qz - back).amax() < 1e-12);
        }
    }

    #[test]
    fn h1_projection_excludes_all_ones_radius_direction() {
        let n = 9;
        let projector = SubspaceProjector::h1(n);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f_n_plus_1 = DVector::from_fn(2 * n, |i, _| if i >= n { 1.0 } else { 0.0 });
        for _ in 0..8 {
            let raw = DVector::from_fn(2 * n, |_, _| rng.random_range(-1.0..1.0));
            let z = projector.project(&raw);
            assert!(z.dot(&f_n_plus_1).abs() < 1e-12);
        }
    }

    #[test]
    fn projectors_are_idempotent_and_nested() {
        for n in [3usize, 6, 11] {
            let h1 = SubspaceProjector::h1(n);
            let ht = SubspaceProjector::h_tilde(n);
            assert_eq!(ht.basis().ncols(), 2 * n - 4);
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..4 {
                let raw = DVector::from_fn(2 * n, |_, _| rng.random_range(-1.0..1.0));
                let once = ht.project(&raw);
                let twice = ht.project(&once);
                assert!((&once - twice).amax() < 1e-12);
                // H̃ ⊂ H₁: H̃-projected vectors already satisfy the two
                // mean-zero rows.
                let h1_rows = h1.constraint_rows() * &once;
                assert!(h1_rows.amax() < 1e-12);
            }
        }
    }

    #[test]
    fn min_rayleigh_positive_bounded_and_above_floor() {
        for n in 3..=32 {
            let bundle = build_bundle(n);
            let least = min_rayleigh_u_on_htilde(&bundle).unwrap();
            assert!(least > 0.0, "n={n}");
            assert!(least <= 1.0 + 1e-12, "n={n}: {least}");
            let floor = rayleigh_floor(&bundle);
            assert!(floor > 0.0);
            assert!(
                least >= floor / n as f64 * (1.0 - 1e-9),
                "n={n}: least={least}, floor/n={}",
                floor / n as f64
            );
        }
    }

    #[test]
    fn fd_check_passes_and_flags_wrong_step() {
        let report = gradient_and_hessian_fd_check(5, FD_STEP).unwrap();
        assert!(report.pass);
        assert!(report.f_at_star.abs() < 1e-12);
        assert!(report.g_at_star.abs() < 1e-12);
        assert!(report.span_residual_f < 1e-10);

        // A grotesque step defeats the truncation-error budget.
        assert!(gradient_and_hessian_fd_check(5, 0.3).is_err());
    }
}
