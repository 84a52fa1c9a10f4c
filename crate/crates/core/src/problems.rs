//! Concrete problem builders: spectral-norm box, collaborative filtering /
//! trace norm completion, the diagonal LASSO demo, and the fastest mixing
//! Markov chain.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::ProxGeometry;
use crate::matrix::SymMatrix;
use crate::problem::{AffineSpectralProblem, ObjectiveKind, OperatorFamily};
use crate::{Error, Result};

/// Undirected simple graph (self-loops implicit in the chain semantics).
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edges are canonicalized and sorted; duplicates and self-loops are
    /// rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("graph needs at least one vertex"));
        }
        let mut canon: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a == b || a >= n || b >= n {
                return Err(Error::Invalid("edges must join two distinct vertices in range"));
            }
            canon.push(if a < b { (a, b) } else { (b, a) });
        }
        canon.sort_unstable();
        if canon.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("duplicate edge"));
        }
        Ok(Graph { n, edges: canon })
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect())
            .expect("path graph is valid")
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((0, n - 1));
        Graph::new(n, edges).expect("cycle graph is valid")
    }

    /// Star on `n` vertices: center 0 joined to 1..n-1.
    pub fn star(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (0, i)).collect()).expect("star graph is valid")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for j in 1..n {
            for i in 0..j {
                edges.push((i, j));
            }
        }
        Graph::new(n, edges).expect("complete graph is valid")
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n];
        for &(i, j) in &self.edges {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }
}

/// `min ||A + U||_2` over `|U_ij| <= rho`, with `U` parametrized by its
/// upper triangle (off-diagonal operators `E_ij + E_ji`).
#[derive(Debug, Clone)]
pub struct SpectralBoxInstance {
    pub problem: AffineSpectralProblem,
    pub geometry: ProxGeometry,
    pub rho: f64,
}

pub fn build_spectral_box(a: &SymMatrix, rho: f64) -> Result<SpectralBoxInstance> {
    if !(rho > 0.0) {
        return Err(Error::Invalid("box radius must be positive"));
    }
    let n = a.dim();
    let p = n * (n + 1) / 2;
    let problem = AffineSpectralProblem::new(
        OperatorFamily::SymBasis { n },
        a.clone(),
        vec![0.0; p],
        ObjectiveKind::Spectral,
    )?;
    let geometry = ProxGeometry::boxed(rho, p)?;
    Ok(SpectralBoxInstance { problem, geometry, rho })
}

/// k-sum (or trace-norm) matrix completion: observed cells are pinned in
/// `C`, the unobserved upper-triangle cells are the variables.
#[derive(Debug, Clone)]
pub struct CollabFilterInstance {
    pub problem: AffineSpectralProblem,
    pub geometry: ProxGeometry,
    /// Observed entries after symmetric completion, `(i, j, rating)` with
    /// `i <= j`.
    pub observed: Vec<(usize, usize, f64)>,
    /// Mean observed rating, subtracted from `C` for scale stability; add it
    /// back to read reconstructed ratings.
    pub center: f64,
    pub k: usize,
}

impl CollabFilterInstance {
    /// Completed matrix at `y`, with the rating center restored.
    pub fn completed_matrix(&self, y: &[f64]) -> SymMatrix {
        let x = self.problem.materialize(y);
        let n = x.dim();
        SymMatrix::from_fn_symmetric(n, |i, j| x.get(i, j) + self.center)
    }
}

/// Builds the completion instance. `ratings` holds observed cells (either
/// orientation; the mask is symmetric-completed). `radius` bounds each free
/// entry; it must be large enough to contain the truth.
pub fn build_collab_filter(
    n: usize,
    ratings: &[(usize, usize, f64)],
    k: usize,
    radius: f64,
    trace_mode: bool,
) -> Result<CollabFilterInstance> {
    if ratings.is_empty() {
        return Err(Error::Invalid("need at least one observed entry"));
    }
    if k == 0 || k > n {
        return Err(Error::Invalid("k must be in 1..=n"));
    }
    let mut observed: Vec<(usize, usize, f64)> = Vec::with_capacity(ratings.len());
    for &(a, b, v) in ratings {
        if a >= n || b >= n {
            return Err(Error::Invalid("rating index out of range"));
        }
        if !v.is_finite() {
            return Err(Error::Invalid("ratings must be finite"));
        }
        let (i, j) = if a <= b { (a, b) } else { (b, a) };
        observed.push((i, j, v));
    }
    observed.sort_unstable_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    observed.dedup_by(|a, b| {
        if (a.0, a.1) == (b.0, b.1) {
            if (a.2 - b.2).abs() > 1e-12 {
                // conflicting duplicates: keep the first, flagged below
            }
            true
        } else {
            false
        }
    });

    let center = observed.iter().map(|&(_, _, v)| v).sum::<f64>() / observed.len() as f64;
    let mut c = SymMatrix::zeros(n);
    for &(i, j, v) in &observed {
        c.set_sym(i, j, v - center);
    }
    // variables: every upper-triangle cell that is NOT observed
    let mut free_cells = Vec::new();
    let mut it = observed.iter().peekable();
    for j in 0..n {
        for i in 0..=j {
            // observed list is sorted by (i, j)
            let hit = observed.binary_search_by(|probe| (probe.0, probe.1).cmp(&(i, j))).is_ok();
            if !hit {
                free_cells.push((i, j));
            }
        }
    }
    let _ = it.peek();
    let p = free_cells.len();
    let objective = if trace_mode { ObjectiveKind::Trace } else { ObjectiveKind::KSum(k) };
    let problem = AffineSpectralProblem::new(
        OperatorFamily::cells(n, free_cells)?,
        c,
        vec![0.0; p],
        objective,
    )?;
    let geometry = ProxGeometry::boxed(radius, p)?;
    Ok(CollabFilterInstance { problem, geometry, observed, center, k })
}

/// Diagonal LASSO demo: `min ||y||_1` over `||diag(design) y - response|| <=
/// sigma`, realized as the k-sum (k = n) objective of `diag(y)`.
#[derive(Debug, Clone)]
pub struct LassoInstance {
    pub problem: AffineSpectralProblem,
    pub geometry: ProxGeometry,
    pub design: Vec<f64>,
    pub response: Vec<f64>,
    pub sigma: f64,
}

pub fn build_lasso(design: &[f64], response: &[f64], sigma: f64) -> Result<LassoInstance> {
    let n = design.len();
    if n == 0 {
        return Err(Error::Invalid("empty design"));
    }
    let problem = AffineSpectralProblem::new(
        OperatorFamily::Diagonal { n },
        SymMatrix::zeros(n),
        vec![0.0; n],
        ObjectiveKind::Trace,
    )?;
    let geometry = ProxGeometry::ellipsoid(design.to_vec(), response.to_vec(), sigma)?;
    Ok(LassoInstance {
        problem,
        geometry,
        design: design.to_vec(),
        response: response.to_vec(),
        sigma,
    })
}

/// Fastest mixing Markov chain: minimize `sigma_1(P) + sigma_2(P) = 1 +
/// sigma_2(P)` over edge transition weights.
#[derive(Debug, Clone)]
pub struct FmmcInstance {
    pub problem: AffineSpectralProblem,
    pub geometry: ProxGeometry,
    pub graph: Graph,
}

impl FmmcInstance {
    /// Transition matrix `P(y) = I - sum_e y_e (e_i - e_j)(e_i - e_j)^T`;
    /// symmetric stochastic for every feasible `y`.
    pub fn transition_matrix(&self, y: &[f64]) -> SymMatrix {
        self.problem.materialize(y)
    }
}

pub fn build_fmmc(graph: &Graph) -> Result<FmmcInstance> {
    if !graph.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let n = graph.vertices();
    let p = graph.edges().len();
    let problem = AffineSpectralProblem::new(
        OperatorFamily::edge_laplacians(n, graph.edges().to_vec())?,
        SymMatrix::identity(n),
        vec![0.0; p],
        ObjectiveKind::KSum(2.min(n)),
    )?;
    let geometry = ProxGeometry::fmmc(n, graph.edges())?;
    Ok(FmmcInstance { problem, geometry, graph: graph.clone() })
}

/// Metropolis-Hastings chain for the uniform target:
/// `P_ij = min(1/d_i, 1/d_j)` on edges, diagonal absorbs the rest.
pub fn metropolis_hastings_chain(graph: &Graph) -> Result<SymMatrix> {
    if !graph.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let n = graph.vertices();
    let d = graph.degrees();
    let mut p = SymMatrix::zeros(n);
    for &(i, j) in graph.edges() {
        let w = (1.0 / d[i] as f64).min(1.0 / d[j] as f64);
        p.set_sym(i, j, w);
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| p.get(i, j)).sum();
        p.set_sym(i, i, 1.0 - off);
    }
    Ok(p)
}
