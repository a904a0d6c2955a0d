//! Small dense linear-algebra helpers shared by the spectral and manifold
//! modules. All matrices here are tiny (at most a few hundred rows), so we
//! lean on nalgebra's dense factorizations throughout.

use nalgebra::{DMatrix, DVector};

/// Orthogonal projector onto the kernel of `rows` (a full-rank `m × d` matrix
/// with `m < d`): `P = I − Aᵀ(AAᵀ)⁻¹A`.
pub fn kernel_projector(rows: &DMatrix<f64>) -> DMatrix<f64> {
    let d = rows.ncols();
    let gram = rows * rows.transpose();
    let gram_inv = gram
        .try_inverse()
        .expect("constraint rows must be linearly independent");
    DMatrix::identity(d, d) - rows.transpose() * gram_inv * rows
}

/// Orthonormal basis of the kernel of `rows`, returned as the columns of a
/// `d × (d − m)` matrix.
///
/// The projector onto the kernel is symmetric idempotent, so its spectrum is
/// {0, 1}; the eigenvectors at 1 form the basis we want and come out
/// orthonormal for free.
pub fn orthonormal_kernel_basis(rows: &DMatrix<f64>) -> DMatrix<f64> {
    let d = rows.ncols();
    let m = rows.nrows();
    let projector = kernel_projector(rows);
    let eig = projector.symmetric_eigen();
    let mut columns: Vec<DVector<f64>> = Vec::with_capacity(d - m);
    for (i, &value) in eig.eigenvalues.iter().enumerate() {
        if value > 0.5 {
            columns.push(eig.eigenvectors.column(i).into_owned());
        }
    }
    assert_eq!(
        columns.len(),
        d - m,
        "kernel dimension mismatch: expected {}, found {}",
        d - m,
        columns.len()
    );
    DMatrix::from_columns(&columns)
}

/// Eigenvalues of the symmetric pencil `A x = θ B x` with `B` positive
/// definite, computed via the Cholesky reduction `L⁻¹ A L⁻ᵀ`.
pub fn generalized_symmetric_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let chol = b
        .clone()
        .cholesky()
        .expect("pencil right-hand side must be positive definite");
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .expect("Cholesky factor is invertible");
    let reduced = &l_inv * a * l_inv.transpose();
    // Symmetrize against round-off before the eigensolve.
    let sym = (&reduced + reduced.transpose()) * 0.5;
    let mut eigs: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Top eigenpair of the symmetric pencil `A x = θ B x` with `B` positive
/// definite; the eigenvector is returned in the original coordinates,
/// normalized to unit Euclidean length.
pub fn generalized_symmetric_max_eigenpair(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
) -> (f64, DVector<f64>) {
    let chol = b
        .clone()
        .cholesky()
        .expect("pencil right-hand side must be positive definite");
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .expect("Cholesky factor is invertible");
    let reduced = &l_inv * a * l_inv.transpose();
    let sym = (&reduced + reduced.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    let y = eig.eigenvectors.column(best).into_owned();
    let x = l_inv.transpose() * y;
    let norm = x.norm();
    (eig.eigenvalues[best], x / norm)
}

/// Sorted eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues_sorted(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut eigs: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Largest absolute entry of a matrix; the metric used by the identity checks.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_basis_of_mean_zero_rows() {
        // Kernel of the all-ones row in R^5: dimension 4, orthonormal, mean-zero.
        let rows = DMatrix::from_row_slice(1, 5, &[1.0; 5]);
        let basis = orthonormal_kernel_basis(&rows);
        assert_eq!(basis.ncols(), 4);
        let gram = basis.transpose() * &basis;
        assert!(max_abs(&(gram - DMatrix::identity(4, 4))) < 1e-12);
        for j in 0..4 {
            assert!(basis.column(j).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn generalized_eigs_reduce_to_ordinary_for_identity_rhs() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let b = DMatrix::identity(2, 2);
        let eigs = generalized_symmetric_eigenvalues(&a, &b);
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);
    }
}
