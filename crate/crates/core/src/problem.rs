//! Affine spectral matrix families `X(y) = sum_j y_j A_j + C`.
//!
//! The solver never materializes the stacked matrix `A` (n^2 x p): each
//! operator family knows how to build `X(y)`, contract `<A_j, G>` against a
//! factored certificate `G = sum_t s_t v_t v_t^T`, and expose the row norms
//! `||A_(l)||` of the stacked matrix, all through structured fast paths.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::{ColumnAccess, SymMatrix};
use crate::scalar::sqrt;
use crate::{Error, Result};

/// Certificate factor: a sign and a unit vector; `G = sum_t sign_t v_t v_t^T`.
#[derive(Debug, Clone)]
pub struct CertVector {
    pub sign: f64,
    pub vector: Vec<f64>,
}

/// Objective of the affine spectral problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    /// `||X(y)||_2`
    Spectral,
    /// `sum of the k largest singular values of X(y)`
    KSum(usize),
    /// Trace norm: k-sum with k = n, with the early-exit observation that a
    /// k-sum optimum of rank < k is trace-norm optimal.
    Trace,
}

impl ObjectiveKind {
    pub fn k(&self, n: usize) -> usize {
        match self {
            ObjectiveKind::Spectral => 1,
            ObjectiveKind::KSum(k) => *k,
            ObjectiveKind::Trace => n,
        }
    }
}

/// Structured operator collections `A_1 .. A_p`.
#[derive(Debug, Clone)]
pub enum OperatorFamily {
    /// Explicit dense symmetric operators (test/reference path).
    Dense(Vec<SymMatrix>),
    /// Symmetric unit basis over the whole upper triangle:
    /// `B_(i,i) = E_ii`, `B_(i,j) = E_ij + E_ji`; p = n(n+1)/2.
    SymBasis { n: usize },
    /// Unit basis over an explicit set of upper-triangle cells.
    Cells { n: usize, cells: Vec<(usize, usize)> },
    /// Diagonal unit basis: `A_j = E_jj`; p = n.
    Diagonal { n: usize },
    /// Negated edge Laplacians `A_e = -(e_i - e_j)(e_i - e_j)^T`.
    EdgeLaplacians { n: usize, edges: Vec<(usize, usize)>, incident: Vec<Vec<usize>> },
}

/// Upper-triangle linear index for `i <= j`.
#[inline]
pub fn tri_index(i: usize, j: usize) -> usize {
    debug_assert!(i <= j);
    j * (j + 1) / 2 + i
}

impl OperatorFamily {
    /// Edges are canonicalized to `i < j` and sorted, so the variable order
    /// is deterministic regardless of input order.
    pub fn edge_laplacians(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut sorted: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a == b || a >= n || b >= n {
                return Err(Error::Invalid("edges must join two distinct vertices"));
            }
            sorted.push(if a < b { (a, b) } else { (b, a) });
        }
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("duplicate edge"));
        }
        let mut incident = vec![Vec::new(); n];
        for (e, &(i, j)) in sorted.iter().enumerate() {
            incident[i].push(e);
            incident[j].push(e);
        }
        Ok(OperatorFamily::EdgeLaplacians { n, edges: sorted, incident })
    }

    pub fn cells(n: usize, mut cells: Vec<(usize, usize)>) -> Result<Self> {
        for c in cells.iter_mut() {
            if c.0 > c.1 {
                *c = (c.1, c.0);
            }
            if c.1 >= n {
                return Err(Error::Invalid("cell index out of range"));
            }
        }
        cells.sort_unstable();
        cells.dedup();
        Ok(OperatorFamily::Cells { n, cells })
    }

    pub fn dim(&self) -> usize {
        match self {
            OperatorFamily::Dense(ops) => ops.first().map(|m| m.dim()).unwrap_or(0),
            OperatorFamily::SymBasis { n }
            | OperatorFamily::Cells { n, .. }
            | OperatorFamily::Diagonal { n }
            | OperatorFamily::EdgeLaplacians { n, .. } => *n,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            OperatorFamily::Dense(ops) => ops.len(),
            OperatorFamily::SymBasis { n } => n * (n + 1) / 2,
            OperatorFamily::Cells { cells, .. } => cells.len(),
            OperatorFamily::Diagonal { n } => *n,
            OperatorFamily::EdgeLaplacians { edges, .. } => edges.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `out += sum_j y_j A_j`.
    pub fn accumulate(&self, y: &[f64], out: &mut SymMatrix) {
        match self {
            OperatorFamily::Dense(ops) => {
                for (a, &c) in ops.iter().zip(y) {
                    if c != 0.0 {
                        out.add_scaled(a, c);
                    }
                }
            }
            OperatorFamily::SymBasis { n } => {
                for j in 0..*n {
                    for i in 0..=j {
                        out.add_sym(i, j, y[tri_index(i, j)]);
                    }
                }
            }
            OperatorFamily::Cells { cells, .. } => {
                for (q, &(i, j)) in cells.iter().enumerate() {
                    out.add_sym(i, j, y[q]);
                }
            }
            OperatorFamily::Diagonal { n } => {
                for i in 0..*n {
                    out.add_sym(i, i, y[i]);
                }
            }
            OperatorFamily::EdgeLaplacians { edges, .. } => {
                for (e, &(i, j)) in edges.iter().enumerate() {
                    let w = y[e];
                    if w == 0.0 {
                        continue;
                    }
                    out.add_sym(i, i, -w);
                    out.add_sym(j, j, -w);
                    out.add_sym(i, j, w);
                }
            }
        }
    }

    /// `out[j] = <A_j, G>` for `G = sum_t s_t v_t v_t^T`.
    pub fn adjoint_apply(&self, cert: &[CertVector], out: &mut [f64]) {
        out.fill(0.0);
        match self {
            OperatorFamily::Dense(ops) => {
                for (j, a) in ops.iter().enumerate() {
                    out[j] = cert.iter().map(|c| c.sign * a.quad_form(&c.vector)).sum();
                }
            }
            OperatorFamily::SymBasis { n } => {
                for j in 0..*n {
                    for i in 0..=j {
                        let mut g = 0.0;
                        for c in cert {
                            g += c.sign * c.vector[i] * c.vector[j];
                        }
                        out[tri_index(i, j)] = if i == j { g } else { 2.0 * g };
                    }
                }
            }
            OperatorFamily::Cells { cells, .. } => {
                for (q, &(i, j)) in cells.iter().enumerate() {
                    let mut g = 0.0;
                    for c in cert {
                        g += c.sign * c.vector[i] * c.vector[j];
                    }
                    out[q] = if i == j { g } else { 2.0 * g };
                }
            }
            OperatorFamily::Diagonal { n } => {
                for i in 0..*n {
                    out[i] = cert.iter().map(|c| c.sign * c.vector[i] * c.vector[i]).sum();
                }
            }
            OperatorFamily::EdgeLaplacians { edges, .. } => {
                for (e, &(i, j)) in edges.iter().enumerate() {
                    let mut g = 0.0;
                    for c in cert {
                        let d = c.vector[i] - c.vector[j];
                        g -= c.sign * d * d;
                    }
                    out[e] = g;
                }
            }
        }
    }

    /// Row norm `||A_(l)||_2` of the stacked matrix, `l = col * n + row`.
    pub fn row_norm(&self, l: usize) -> f64 {
        let n = self.dim();
        let (r, c) = (l % n, l / n);
        match self {
            OperatorFamily::Dense(ops) => {
                sqrt(ops.iter().map(|a| a.get(r, c) * a.get(r, c)).sum::<f64>())
            }
            OperatorFamily::SymBasis { .. } => 1.0,
            OperatorFamily::Cells { cells, .. } => {
                let key = if r <= c { (r, c) } else { (c, r) };
                if cells.binary_search(&key).is_ok() {
                    1.0
                } else {
                    0.0
                }
            }
            OperatorFamily::Diagonal { .. } => {
                if r == c {
                    1.0
                } else {
                    0.0
                }
            }
            OperatorFamily::EdgeLaplacians { edges, incident, .. } => {
                if r == c {
                    sqrt(incident[r].len() as f64)
                } else {
                    let key = if r < c { (r, c) } else { (c, r) };
                    if edges.binary_search(&key).is_ok() {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        }
    }

    /// `||A||_F^2` of the stacked matrix.
    pub fn frobenius_sq(&self) -> f64 {
        match self {
            OperatorFamily::Dense(ops) => ops.iter().map(|a| a.frobenius_norm_sq()).sum(),
            OperatorFamily::SymBasis { n } => (n * n) as f64,
            OperatorFamily::Cells { cells, .. } => {
                cells.iter().map(|&(i, j)| if i == j { 1.0 } else { 2.0 }).sum()
            }
            OperatorFamily::Diagonal { n } => *n as f64,
            OperatorFamily::EdgeLaplacians { edges, .. } => 4.0 * edges.len() as f64,
        }
    }

    /// Rows of the stacked matrix with nonzero norm, as vec-positions
    /// `l = col * n + row`; `None` means every row (dense support).
    pub fn row_support(&self) -> Option<Vec<usize>> {
        let n = self.dim();
        match self {
            OperatorFamily::Dense(_) | OperatorFamily::SymBasis { .. } => None,
            OperatorFamily::Cells { cells, .. } => {
                let mut support = Vec::with_capacity(2 * cells.len());
                for &(i, j) in cells {
                    support.push(j * n + i);
                    if i != j {
                        support.push(i * n + j);
                    }
                }
                support.sort_unstable();
                Some(support)
            }
            OperatorFamily::Diagonal { .. } => Some((0..n).map(|i| i * n + i).collect()),
            OperatorFamily::EdgeLaplacians { edges, .. } => {
                let mut support: Vec<usize> = (0..n).map(|i| i * n + i).collect();
                for &(i, j) in edges {
                    support.push(j * n + i);
                    support.push(i * n + j);
                }
                support.sort_unstable();
                Some(support)
            }
        }
    }

    /// `out += scale * A_(l)` (row `l` of the stacked matrix, a p-vector).
    pub fn accumulate_row(&self, l: usize, scale: f64, out: &mut [f64]) {
        let n = self.dim();
        let (r, c) = (l % n, l / n);
        match self {
            OperatorFamily::Dense(ops) => {
                for (j, a) in ops.iter().enumerate() {
                    out[j] += scale * a.get(r, c);
                }
            }
            OperatorFamily::SymBasis { .. } => {
                let (i, j) = if r <= c { (r, c) } else { (c, r) };
                out[tri_index(i, j)] += scale;
            }
            OperatorFamily::Cells { cells, .. } => {
                let key = if r <= c { (r, c) } else { (c, r) };
                if let Ok(q) = cells.binary_search(&key) {
                    out[q] += scale;
                }
            }
            OperatorFamily::Diagonal { .. } => {
                if r == c {
                    out[r] += scale;
                }
            }
            OperatorFamily::EdgeLaplacians { edges, incident, .. } => {
                if r == c {
                    for &e in &incident[r] {
                        out[e] -= scale;
                    }
                } else {
                    let key = if r < c { (r, c) } else { (c, r) };
                    if let Ok(e) = edges.binary_search(&key) {
                        out[e] += scale;
                    }
                }
            }
        }
    }
}

/// The full affine family `X(y) = sum_j y_j A_j + C` with objective kind,
/// offset `b` and precomputed stacked-matrix row data.
#[derive(Debug, Clone)]
pub struct AffineSpectralProblem {
    family: OperatorFamily,
    c: SymMatrix,
    b: Vec<f64>,
    objective: ObjectiveKind,
    frob_sq: f64,
    row_support: Option<Vec<usize>>,
}

impl AffineSpectralProblem {
    pub fn new(
        family: OperatorFamily,
        c: SymMatrix,
        b: Vec<f64>,
        objective: ObjectiveKind,
    ) -> Result<Self> {
        if c.dim() != family.dim() {
            return Err(Error::Dimension("offset matrix dimension must match operators"));
        }
        if b.len() != family.len() {
            return Err(Error::Dimension("b length must match the number of operators"));
        }
        if let OperatorFamily::Dense(ops) = &family {
            if ops.iter().any(|a| a.dim() != c.dim()) {
                return Err(Error::Dimension("all operators must share the matrix dimension"));
            }
        }
        if let ObjectiveKind::KSum(k) = objective {
            if k == 0 || k > c.dim() {
                return Err(Error::Invalid("k must be in 1..=n"));
            }
        }
        let frob_sq = family.frobenius_sq();
        let row_support = family.row_support();
        Ok(AffineSpectralProblem { family, c, b, objective, frob_sq, row_support })
    }

    pub fn n(&self) -> usize {
        self.c.dim()
    }

    pub fn p(&self) -> usize {
        self.family.len()
    }

    pub fn k(&self) -> usize {
        self.objective.k(self.n())
    }

    pub fn objective_kind(&self) -> ObjectiveKind {
        self.objective
    }

    pub fn family(&self) -> &OperatorFamily {
        &self.family
    }

    pub fn offset(&self) -> &SymMatrix {
        &self.c
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `||A||_F^2` of the stacked matrix (drives the quadratic variation
    /// bound `M_*^2`).
    pub fn stacked_frobenius_sq(&self) -> f64 {
        self.frob_sq
    }

    pub fn row_norm(&self, l: usize) -> f64 {
        self.family.row_norm(l)
    }

    /// Positions of nonzero stacked rows; `None` = all `n^2`.
    pub fn row_support(&self) -> Option<&[usize]> {
        self.row_support.as_deref()
    }

    /// `X(y) = sum_j y_j A_j + C`, accumulated without forming dense
    /// operators.
    pub fn materialize(&self, y: &[f64]) -> SymMatrix {
        let mut out = self.c.clone();
        self.family.accumulate(y, &mut out);
        out
    }

    pub fn materialize_into(&self, y: &[f64], out: &mut SymMatrix) {
        out.clone_from(&self.c);
        self.family.accumulate(y, out);
    }

    /// Exact stacked-adjoint contraction `A^T vec(G)` for a factored
    /// certificate.
    pub fn adjoint_exact(&self, cert: &[CertVector]) -> Vec<f64> {
        let mut out = vec![0.0; self.p()];
        self.family.adjoint_apply(cert, &mut out);
        out
    }

    /// `<C, G>` for a factored certificate.
    pub fn offset_inner(&self, cert: &[CertVector]) -> f64 {
        cert.iter().map(|cv| cv.sign * self.c.quad_form(&cv.vector)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    /// Brute-force stacked matrix for small dense checks.
    fn stack(family: &OperatorFamily) -> Vec<Vec<f64>> {
        let n = family.dim();
        let p = family.len();
        let mut rows = vec![vec![0.0; p]; n * n];
        for j in 0..p {
            let mut y = vec![0.0; p];
            y[j] = 1.0;
            let mut m = SymMatrix::zeros(n);
            family.accumulate(&y, &mut m);
            for c in 0..n {
                for r in 0..n {
                    rows[c * n + r][j] = m.get(r, c);
                }
            }
        }
        rows
    }

    fn check_row_data(family: &OperatorFamily) {
        let n = family.dim();
        let rows = stack(family);
        let mut frob = 0.0;
        for (l, row) in rows.iter().enumerate() {
            let norm = crate::scalar::sqrt(row.iter().map(|v| v * v).sum::<f64>());
            assert!(
                (family.row_norm(l) - norm).abs() < 1e-10,
                "row {l}: {} vs {}",
                family.row_norm(l),
                norm
            );
            frob += norm * norm;
        }
        assert!((family.frobenius_sq() - frob).abs() < 1e-9);
        // support covers exactly the nonzero rows
        if let Some(support) = family.row_support() {
            for l in 0..n * n {
                let nonzero = rows[l].iter().any(|v| *v != 0.0);
                assert_eq!(support.binary_search(&l).is_ok(), nonzero, "support row {l}");
            }
        }
    }

    fn families() -> Vec<OperatorFamily> {
        let mut rng = RngStream::new(3);
        let dense: Vec<SymMatrix> = (0..4)
            .map(|_| SymMatrix::from_dense(&rng.gaussian_matrix(5, 5)).unwrap())
            .collect();
        vec![
            OperatorFamily::Dense(dense),
            OperatorFamily::SymBasis { n: 5 },
            OperatorFamily::cells(5, vec![(0, 1), (2, 2), (3, 4), (1, 3)]).unwrap(),
            OperatorFamily::Diagonal { n: 5 },
            OperatorFamily::edge_laplacians(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
                .unwrap(),
        ]
    }

    #[test]
    fn row_norms_match_brute_force() {
        for family in families() {
            check_row_data(&family);
        }
    }

    #[test]
    fn adjoint_matches_stacked_contraction() {
        let mut rng = RngStream::new(9);
        for family in families() {
            let n = family.dim();
            let p = family.len();
            let cert = vec![
                CertVector { sign: 1.0, vector: rng.unit_vector(n) },
                CertVector { sign: -1.0, vector: rng.unit_vector(n) },
            ];
            // G dense
            let mut g = vec![0.0; n * n];
            for c in 0..n {
                for r in 0..n {
                    for cv in &cert {
                        g[c * n + r] += cv.sign * cv.vector[r] * cv.vector[c];
                    }
                }
            }
            let rows = stack(&family);
            let mut want = vec![0.0; p];
            for l in 0..n * n {
                for j in 0..p {
                    want[j] += rows[l][j] * g[l];
                }
            }
            let mut got = vec![0.0; p];
            family.adjoint_apply(&cert, &mut got);
            for j in 0..p {
                assert!((got[j] - want[j]).abs() < 1e-10, "j={j}: {} vs {}", got[j], want[j]);
            }
            // accumulate_row agrees with the stacked rows
            let mut acc = vec![0.0; p];
            for l in 0..n * n {
                acc.fill(0.0);
                family.accumulate_row(l, 2.5, &mut acc);
                for j in 0..p {
                    assert!((acc[j] - 2.5 * rows[l][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn materialize_at_zero_is_offset() {
        let mut rng = RngStream::new(21);
        let c = SymMatrix::from_dense(&rng.gaussian_matrix(4, 4)).unwrap();
        let problem = AffineSpectralProblem::new(
            OperatorFamily::SymBasis { n: 4 },
            c.clone(),
            vec![0.0; 10],
            ObjectiveKind::Spectral,
        )
        .unwrap();
        let x = problem.materialize(&vec![0.0; 10]);
        assert_eq!(x, c);
    }

    #[test]
    fn sym_basis_unvec_round_trip() {
        // X(y) = C + U with U = unvec(y) symmetrized over the upper triangle
        let n = 3;
        let problem = AffineSpectralProblem::new(
            OperatorFamily::SymBasis { n },
            SymMatrix::zeros(n),
            vec![0.0; 6],
            ObjectiveKind::Spectral,
        )
        .unwrap();
        let mut y = vec![0.0; 6];
        y[tri_index(0, 1)] = 2.0;
        y[tri_index(2, 2)] = -1.0;
        let x = problem.materialize(&y);
        assert_eq!(x.get(0, 1), 2.0);
        assert_eq!(x.get(1, 0), 2.0);
        assert_eq!(x.get(2, 2), -1.0);
        assert_eq!(x.get(0, 0), 0.0);
    }
}
