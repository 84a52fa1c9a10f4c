//! Shared fixtures for the core integration tests.

use specsub_core::matrix::{ColumnAccess, DenseMatrix, SymMatrix};
use specsub_core::RngStream;

/// Random symmetric matrix with a prescribed spectrum: conjugates
/// `diag(spectrum)` by an orthogonalized Gaussian matrix (modified
/// Gram-Schmidt; Haar exactness does not matter for these tests).
pub fn random_spectrum_sym(spectrum: &[f64], seed: u64) -> SymMatrix {
    let n = spectrum.len();
    let mut rng = RngStream::new(seed);
    let mut q = rng.gaussian_matrix(n, n);
    for j in 0..n {
        for _ in 0..2 {
            for prev in 0..j {
                let proj: f64 = q.col(prev).iter().zip(q.col(j)).map(|(a, b)| a * b).sum();
                let prev_col: Vec<f64> = q.col(prev).to_vec();
                for (t, v) in q.col_mut(j).iter_mut().enumerate() {
                    *v -= proj * prev_col[t];
                }
            }
        }
        let norm: f64 = q.col(j).iter().map(|v| v * v).sum::<f64>();
        let norm = norm.sqrt();
        q.col_mut(j).iter_mut().for_each(|v| *v /= norm);
    }
    SymMatrix::from_fn_symmetric(n, |i, j| {
        (0..n).map(|k| q.get(i, k) * spectrum[k] * q.get(j, k)).sum()
    })
}

/// Dense random symmetric matrix.
pub fn random_sym(n: usize, seed: u64) -> SymMatrix {
    let mut rng = RngStream::new(seed);
    SymMatrix::from_dense(&rng.gaussian_matrix(n, n)).unwrap()
}

/// Singular values of a small dense matrix through the Jacobi baseline on
/// its Gram matrix (descending).
pub fn jacobi_singular_values(s: &DenseMatrix) -> Vec<f64> {
    let k = s.cols();
    let gram = SymMatrix::from_fn_symmetric(k, |i, j| {
        s.col(i).iter().zip(s.col(j)).map(|(a, b)| a * b).sum()
    });
    let eig = specsub_core::jacobi::jacobi_eig(&gram).unwrap();
    eig.values.iter().map(|v| v.max(0.0).sqrt()).collect()
}

/// Spectral norm oracle for symmetric matrices via Jacobi.
pub fn jacobi_spectral_norm(x: &SymMatrix) -> f64 {
    specsub_core::jacobi::jacobi_eig(x).unwrap().spectral_norm()
}
