//! Dense helpers in standard coordinates.
//!
//! `L²(μ)` for a `d`-atom measure is mapped isometrically onto `ℂᵈ` by
//! `u ↦ (√w_k u_k)`; all projections, singular values and pseudoinverses are
//! computed there.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::hilbert::SpectralVector;
use crate::spectral::AtomicMeasure;

/// Singular values below `RANK_RTOL · σ_max` are treated as zero.
pub const RANK_RTOL: f64 = 1e-10;

pub(crate) fn to_standard(m: &AtomicMeasure, v: &SpectralVector) -> DVector<Complex64> {
    DVector::from_iterator(m.dim(), m.weights().zip(v.values()).map(|(w, &x)| x * w.sqrt()))
}

pub(crate) fn from_standard(m: &AtomicMeasure, v: &DVector<Complex64>) -> SpectralVector {
    SpectralVector::new(m.weights().zip(v.iter()).map(|(w, &x)| x / w.sqrt()).collect())
}

/// `d × n` matrix whose columns are the vectors in standard coordinates.
pub(crate) fn column_matrix(m: &AtomicMeasure, vectors: &[SpectralVector]) -> DMatrix<Complex64> {
    let cols: Vec<DVector<Complex64>> = vectors.iter().map(|v| to_standard(m, v)).collect();
    DMatrix::from_columns(&cols)
}

/// Orthonormal basis of the column span and the retained singular values,
/// largest first.
pub(crate) fn span_basis(cols: &DMatrix<Complex64>) -> (DMatrix<Complex64>, Vec<f64>) {
    let svd = cols.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma_max = order.first().map_or(0.0, |&i| svd.singular_values[i]);
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&i| sigma_max > 0.0 && svd.singular_values[i] > RANK_RTOL * sigma_max)
        .collect();
    let basis_cols: Vec<DVector<Complex64>> = keep.iter().map(|&i| u.column(i).into_owned()).collect();
    let basis = if basis_cols.is_empty() {
        DMatrix::zeros(cols.nrows(), 0)
    } else {
        DMatrix::from_columns(&basis_cols)
    };
    (basis, keep.iter().map(|&i| svd.singular_values[i]).collect())
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(a: &DMatrix<Complex64>) -> Vec<f64> {
    let mut e: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Minimum-norm least-squares solution of `a x = rhs` with the relative
/// singular-value cutoff, plus all singular values (largest first).
pub(crate) fn pinv_solve(a: &DMatrix<Complex64>, rhs: &DVector<Complex64>) -> (DVector<Complex64>, Vec<f64>) {
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut x = DVector::zeros(a.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if sigma_max > 0.0 && s > RANK_RTOL * sigma_max {
            let coeff = u.column(i).dotc(rhs) / s;
            x += v_t.row(i).adjoint() * coeff;
        }
    }
    let mut sigmas: Vec<f64> = svd.singular_values.iter().copied().collect();
    sigmas.sort_by(|a, b| b.total_cmp(a));
    (x, sigmas)
}
