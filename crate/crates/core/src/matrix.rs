//! Column-major dense matrices, symmetric matrices and triplet sparse
//! matrices — the raw data all sampling kernels draw from.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::sqrt;
use crate::{Error, Result};

/// Column access shared by the sampling kernels: anything that exposes its
/// columns as contiguous slices can be sketched.
pub trait ColumnAccess {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn col(&self, j: usize) -> &[f64];

    fn frobenius_norm_sq(&self) -> f64 {
        (0..self.cols())
            .map(|j| self.col(j).iter().map(|x| x * x).sum::<f64>())
            .sum()
    }

    fn column_norms(&self) -> Vec<f64> {
        (0..self.cols())
            .map(|j| sqrt(self.col(j).iter().map(|x| x * x).sum::<f64>()))
            .collect()
    }
}

/// Dense real matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from column-major storage.
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension("entry count must equal rows * cols"));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::Invalid("matrix entries must be finite"));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.frobenius_norm_sq())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `out = self * x`.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        out.fill(0.0);
        for j in 0..self.cols {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let col = self.col(j);
            for i in 0..self.rows {
                out[i] += col[i] * xj;
            }
        }
    }

    /// `out = self^T * x`.
    pub fn tr_matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for j in 0..self.cols {
            out[j] = dot(self.col(j), x);
        }
    }

    /// Dense product `self * other`; intended for small operands.
    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let bcol = other.col(j);
            let ocol = out.col_mut(j);
            for (l, &b) in bcol.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let acol = &self.data[l * self.rows..(l + 1) * self.rows];
                for i in 0..self.rows {
                    ocol[i] += acol[i] * b;
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl ColumnAccess for DenseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }
}

/// Symmetric real matrix; stores the full square array so column access and
/// matrix-vector products stay contiguous. Symmetrized on ingest.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n);
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Symmetrizes `(m + m^T) / 2` on ingest.
    pub fn from_dense(m: &DenseMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::Dimension("symmetric matrix must be square"));
        }
        let n = m.rows;
        let mut s = Self::zeros(n);
        for j in 0..n {
            for i in 0..n {
                s.data[j * n + i] = 0.5 * (m.get(i, j) + m.get(j, i));
            }
        }
        Ok(s)
    }

    pub fn from_fn_symmetric(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut s = Self::zeros(dim);
        for j in 0..dim {
            for i in 0..=j {
                let v = f(i, j);
                s.data[j * dim + i] = v;
                s.data[i * dim + j] = v;
            }
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.dim + i]
    }

    /// Sets the `(i, j)` and `(j, i)` entries together.
    #[inline(always)]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.dim + i] = v;
        self.data[i * self.dim + j] = v;
    }

    #[inline(always)]
    pub fn add_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.dim + i] += v;
        if i != j {
            self.data[i * self.dim + j] += v;
        }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn fill_zero(&mut self) {
        self.data.fill(0.0);
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.frobenius_norm_sq())
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        out.fill(0.0);
        for j in 0..self.dim {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let col = &self.data[j * self.dim..(j + 1) * self.dim];
            for i in 0..self.dim {
                out[i] += col[i] * xj;
            }
        }
    }

    /// Rayleigh quotient `v^T X v` (for unit `v`).
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.dim {
            let vj = v[j];
            if vj == 0.0 {
                continue;
            }
            acc += vj * dot(&self.data[j * self.dim..(j + 1) * self.dim], v);
        }
        acc
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix { rows: self.dim, cols: self.dim, data: self.data.clone() }
    }

    pub fn add_scaled(&mut self, other: &SymMatrix, s: f64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }
}

impl ColumnAccess for SymMatrix {
    fn rows(&self) -> usize {
        self.dim
    }
    fn cols(&self) -> usize {
        self.dim
    }
    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }
}

/// Sparse matrix in triplet form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    triplets: Vec<(usize, usize, f64)>,
    symmetric: bool,
}

impl SparseMatrix {
    /// Triplets must not contain duplicates or zeros; when `symmetric`, only
    /// entries with `i >= j` are stored and the mirror is implicit.
    pub fn new(
        rows: usize,
        cols: usize,
        triplets: Vec<(usize, usize, f64)>,
        symmetric: bool,
    ) -> Result<Self> {
        for &(i, j, v) in &triplets {
            if i >= rows || j >= cols {
                return Err(Error::Dimension("triplet index out of range"));
            }
            if v == 0.0 || !v.is_finite() {
                return Err(Error::Invalid("triplet values must be nonzero and finite"));
            }
            if symmetric && i < j {
                return Err(Error::Invalid("symmetric triplets must satisfy i >= j"));
            }
        }
        Ok(SparseMatrix { rows, cols, triplets, symmetric })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn nnz(&self) -> usize {
        self.triplets.len()
    }
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }
    pub fn triplets(&self) -> &[(usize, usize, f64)] {
        &self.triplets
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for &(i, j, v) in &self.triplets {
            out[i] += v * x[j];
            if self.symmetric && i != j {
                out[j] += v * x[i];
            }
        }
    }

    pub fn to_sym(&self) -> Result<SymMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension("symmetric matrix must be square"));
        }
        let mut m = SymMatrix::zeros(self.rows);
        for &(i, j, v) in &self.triplets {
            if self.symmetric {
                m.set_sym(i, j, v);
            } else {
                m.data[j * self.rows + i] += v;
            }
        }
        if !self.symmetric {
            let d = m.to_dense();
            m = SymMatrix::from_dense(&d)?;
        }
        Ok(m)
    }
}

#[inline(always)]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    sqrt(dot(v, v))
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
