//! Cyclic Jacobi eigensolver for dense symmetric matrices.
//!
//! Serves as the exact baseline the Lanczos code is tested against. Slow
//! (O(n^3) per sweep) but very accurate, hence the dimension cap.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::{DenseMatrix, SymMatrix};
use crate::scalar::{hypot, sqrt};
use crate::{Error, Result};

/// Default dimension cap for the dense path.
pub const DEFAULT_DIM_CAP: usize = 2000;

/// Full spectrum with an orthogonal eigenbasis.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    /// Eigenvalues sorted in descending order.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, aligned with `values`.
    pub vectors: DenseMatrix,
}

impl EigDecomposition {
    /// Largest eigenvalue magnitude, i.e. the spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Singular values of the (symmetric) input: |eigenvalues| sorted
    /// descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    }
}

pub fn jacobi_eig(x: &SymMatrix) -> Result<EigDecomposition> {
    jacobi_eig_with_cap(x, DEFAULT_DIM_CAP)
}

pub fn jacobi_eig_with_cap(x: &SymMatrix, cap: usize) -> Result<EigDecomposition> {
    let n = x.dim();
    if n > cap {
        return Err(Error::DimensionCap { dim: n, cap });
    }
    if n == 0 {
        return Err(Error::Dimension("empty matrix"));
    }

    // Work on a copy of the full square array.
    let mut a = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            a[j * n + i] = x.get(i, j);
        }
    }
    let mut q = DenseMatrix::identity(n);
    let norm = {
        let s: f64 = a.iter().map(|v| v * v).sum();
        sqrt(s)
    };
    if norm == 0.0 {
        return Ok(EigDecomposition { values: vec![0.0; n], vectors: q });
    }

    let tol = 1e-14 * norm;
    let max_sweeps = 60;
    for _sweep in 0..max_sweeps {
        let mut off = 0.0;
        for j in 1..n {
            for i in 0..j {
                off += a[j * n + i] * a[j * n + i];
            }
        }
        if sqrt(2.0 * off) <= tol {
            break;
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                let apr = a[r * n + p];
                if apr.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let arr = a[r * n + r];
                // Classic two-sided rotation zeroing a[p][r].
                let theta = (arr - app) / (2.0 * apr);
                let t = if theta >= 0.0 {
                    1.0 / (theta + hypot(1.0, theta))
                } else {
                    -1.0 / (-theta + hypot(1.0, theta))
                };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;

                for k in 0..n {
                    let akp = a[p * n + k];
                    let akr = a[r * n + k];
                    a[p * n + k] = c * akp - s * akr;
                    a[r * n + k] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[k * n + p];
                    let ark = a[k * n + r];
                    a[k * n + p] = c * apk - s * ark;
                    a[k * n + r] = s * apk + c * ark;
                }
                a[r * n + p] = 0.0;
                a[p * n + r] = 0.0;
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, c * qkp - s * qkr);
                    q.set(k, r, s * qkp + c * qkr);
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[i * n + i], i)).collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let values: Vec<f64> = pairs.iter().map(|&(v, _)| v).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| q.get(i, pairs[j].1));
    Ok(EigDecomposition { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ColumnAccess;
    use crate::rng::RngStream;

    fn residual(x: &SymMatrix, e: &EigDecomposition) -> f64 {
        let n = x.dim();
        let mut max = 0.0f64;
        let mut xv = vec![0.0; n];
        for j in 0..n {
            x.matvec(e.vectors.col(j), &mut xv);
            let mut r = 0.0;
            for i in 0..n {
                let d = xv[i] - e.values[j] * e.vectors.get(i, j);
                r += d * d;
            }
            max = max.max(sqrt(r));
        }
        max
    }

    #[test]
    fn identity_spectrum() {
        let e = jacobi_eig(&SymMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn recovers_spectrum_under_rotation() {
        // diag(mu) conjugated by a known rotation
        let mu = [3.0, -1.0, 0.5, 2.0];
        let n = mu.len();
        let mut rng = RngStream::new(5);
        let g = rng.gaussian_matrix(n, n);
        // crude orthogonalization via repeated Gram-Schmidt
        let mut q = g;
        for j in 0..n {
            for _ in 0..2 {
                for prev in 0..j {
                    let proj = crate::matrix::dot(q.col(prev), q.col(j));
                    let prev_col: Vec<f64> = q.col(prev).to_vec();
                    crate::matrix::axpy(-proj, &prev_col, q.col_mut(j));
                }
            }
            let nrm = crate::matrix::norm2(q.col(j));
            q.col_mut(j).iter_mut().for_each(|v| *v /= nrm);
        }
        let x = SymMatrix::from_fn_symmetric(n, |i, j| {
            (0..n).map(|k| q.get(i, k) * mu[k] * q.get(j, k)).sum()
        });
        let e = jacobi_eig(&x).unwrap();
        let mut want = mu.to_vec();
        want.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, w) in e.values.iter().zip(&want) {
            assert!((got - w).abs() < 1e-10, "{got} vs {w}");
        }
        assert!(residual(&x, &e) < 1e-9 * x.frobenius_norm());
    }

    #[test]
    fn trace_identity_random() {
        let n = 60;
        let mut rng = RngStream::new(11);
        let g = rng.gaussian_matrix(n, n);
        let x = SymMatrix::from_dense(&g).unwrap();
        let e = jacobi_eig(&x).unwrap();
        let sum: f64 = e.values.iter().sum();
        assert!((sum - x.trace()).abs() <= 1e-9 * x.frobenius_norm().max(1.0));
        assert!(residual(&x, &e) < 1e-9 * x.frobenius_norm());
        // orthogonality of the eigenbasis
        for i in 0..n {
            for j in 0..=i {
                let d = crate::matrix::dot(e.vectors.col(i), e.vectors.col(j));
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        let x = SymMatrix::identity(5);
        assert!(matches!(
            jacobi_eig_with_cap(&x, 4),
            Err(Error::DimensionCap { dim: 5, cap: 4 })
        ));
    }
}
