//! Dense complex linear algebra used by the exact oracles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (DVector<f64>, DMatrix<Complex64>) {
    let se = nalgebra::SymmetricEigen::new(m.clone());
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Indices of the ground eigenspace: all eigenvalues within `tol` of the
/// minimum, assuming `values` ascending.
pub fn ground_space_indices(values: &DVector<f64>, tol: f64) -> Vec<usize> {
    let e0 = values[0];
    (0..values.len())
        .filter(|&i| values[i] - e0 <= tol)
        .collect()
}

/// `exp(scale · m)` for Hermitian `m`, via eigendecomposition.
pub fn hermitian_expm(m: &DMatrix<Complex64>, scale: Complex64) -> DMatrix<Complex64> {
    let (values, vectors) = hermitian_eigen(m);
    let phases = DVector::from_iterator(values.len(), values.iter().map(|&e| (scale * e).exp()));
    &vectors * DMatrix::from_diagonal(&phases) * vectors.adjoint()
}

/// Frobenius distance ignoring global phase: `min_φ ‖a − e^{iφ}b‖`.
pub fn distance_up_to_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let overlap = (a.adjoint() * b).trace();
    if overlap.norm() < 1e-300 {
        return (a - b).norm();
    }
    let phase = overlap / overlap.norm();
    (a - b * phase).norm()
}
