//! Lanczos factorization and leading eigen/singular pair extraction.
//!
//! The solver only ever touches matrix data through `MatVecOracle::apply`,
//! so the same code serves dense symmetric matrices, sketch Gram products
//! `u -> S (S^T u)` and sparse matrices. Each new Lanczos vector is fully
//! reorthogonalized (two-pass classical Gram-Schmidt) against the stored
//! basis; the tridiagonal eigenproblem is solved by bisection plus inverse
//! iteration.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::{axpy, dot, norm2, DenseMatrix, SparseMatrix, SymMatrix};
use crate::rng::RngStream;
use crate::scalar::sqrt;
use crate::{Error, Result};

/// Default relative residual target, matching the usual 1e-8 working
/// precision of iterative eigensolvers.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default number of fresh random restarts before giving up.
pub const DEFAULT_MAX_RESTARTS: usize = 4;

const BREAKDOWN_TOL: f64 = 1e-14;
const MAX_STEPS_CAP: usize = 400;

/// Abstract symmetric operator `u -> X u`.
pub trait MatVecOracle {
    fn dim(&self) -> usize;
    fn apply(&mut self, u: &[f64], out: &mut [f64]);
}

/// Dense symmetric matrix as an oracle (n^2 per product).
pub struct DenseSymOracle<'a> {
    m: &'a SymMatrix,
}

impl<'a> DenseSymOracle<'a> {
    pub fn new(m: &'a SymMatrix) -> Self {
        DenseSymOracle { m }
    }
}

impl MatVecOracle for DenseSymOracle<'_> {
    fn dim(&self) -> usize {
        self.m.dim()
    }
    fn apply(&mut self, u: &[f64], out: &mut [f64]) {
        self.m.matvec(u, out);
    }
}

/// Gram operator `u -> S (S^T u)` of a rectangular factor (2ms per product).
pub struct GramOracle<'a> {
    s: &'a DenseMatrix,
    scratch: Vec<f64>,
}

impl<'a> GramOracle<'a> {
    pub fn new(s: &'a DenseMatrix) -> Self {
        use crate::matrix::ColumnAccess;
        GramOracle { s, scratch: vec![0.0; s.cols()] }
    }
}

impl MatVecOracle for GramOracle<'_> {
    fn dim(&self) -> usize {
        use crate::matrix::ColumnAccess;
        self.s.rows()
    }
    fn apply(&mut self, u: &[f64], out: &mut [f64]) {
        self.s.tr_matvec(u, &mut self.scratch);
        self.s.matvec(&self.scratch, out);
    }
}

/// Sparse symmetric matrix as an oracle (nnz per product).
pub struct SparseSymOracle<'a> {
    m: &'a SparseMatrix,
}

impl<'a> SparseSymOracle<'a> {
    pub fn new(m: &'a SparseMatrix) -> Self {
        SparseSymOracle { m }
    }
}

impl MatVecOracle for SparseSymOracle<'_> {
    fn dim(&self) -> usize {
        self.m.rows()
    }
    fn apply(&mut self, u: &[f64], out: &mut [f64]) {
        self.m.matvec(u, out);
    }
}

/// Operator deflated against already-accepted directions:
/// `u -> (I - VV^T) X (I - VV^T) u`.
struct DeflatedOracle<'a, 'b> {
    base: &'a mut dyn MatVecOracle,
    vs: &'b [Vec<f64>],
    buf: Vec<f64>,
}

impl<'a, 'b> DeflatedOracle<'a, 'b> {
    fn new(base: &'a mut dyn MatVecOracle, vs: &'b [Vec<f64>]) -> Self {
        let n = base.dim();
        DeflatedOracle { base, vs, buf: vec![0.0; n] }
    }
}

fn project_out(vs: &[Vec<f64>], u: &mut [f64]) {
    for v in vs {
        let c = dot(v, u);
        axpy(-c, v, u);
    }
}

impl MatVecOracle for DeflatedOracle<'_, '_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn apply(&mut self, u: &[f64], out: &mut [f64]) {
        self.buf.copy_from_slice(u);
        project_out(self.vs, &mut self.buf);
        self.base.apply(&self.buf, out);
        project_out(self.vs, out);
    }
}

/// Checks linearity and symmetry of an oracle on random probes.
pub fn check_oracle(oracle: &mut dyn MatVecOracle, rng: &mut RngStream, tol: f64) -> bool {
    let n = oracle.dim();
    let u = rng.unit_vector(n);
    let v = rng.unit_vector(n);
    let alpha = 1.0 + rng.next_f64();
    let mut xu = vec![0.0; n];
    let mut xv = vec![0.0; n];
    let mut x_comb = vec![0.0; n];
    oracle.apply(&u, &mut xu);
    oracle.apply(&v, &mut xv);
    let comb: Vec<f64> = u.iter().zip(&v).map(|(a, b)| alpha * a + b).collect();
    oracle.apply(&comb, &mut x_comb);
    let scale = norm2(&xu).max(norm2(&xv)).max(1.0);
    let mut lin_err = 0.0f64;
    for i in 0..n {
        lin_err = lin_err.max((x_comb[i] - alpha * xu[i] - xv[i]).abs());
    }
    let sym_err = (dot(&u, &xv) - dot(&v, &xu)).abs();
    lin_err <= tol * scale && sym_err <= tol * scale
}

// ---------------------------------------------------------------------------
// Lanczos factorization
// ---------------------------------------------------------------------------

/// Partial tridiagonalization `X U_k = U_k T_k + beta_k u_{k+1} e_k^T`.
#[derive(Debug, Clone)]
pub struct LanczosFactorization {
    /// Orthonormal basis, one column per step.
    pub basis: DenseMatrix,
    /// Diagonal of `T_k`.
    pub alphas: Vec<f64>,
    /// Off-diagonal of `T_k` (length `steps - 1`).
    pub betas: Vec<f64>,
    /// Trailing residual norm `beta_k`.
    pub beta_last: f64,
    /// Next unit vector `u_{k+1}` (zero on breakdown).
    pub next_vector: Vec<f64>,
    /// True when the iteration found an invariant subspace early.
    pub breakdown: bool,
    /// Steps taken = matrix-vector products consumed.
    pub steps: usize,
}

impl LanczosFactorization {
    /// `max |T| entry`, a cheap stand-in for `||T||_2` in tolerances.
    pub fn t_norm(&self) -> f64 {
        let a = self.alphas.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let b = self.betas.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        a.max(b).max(self.beta_last.abs())
    }

    /// Frobenius error of the factorization identity, recomputed from the
    /// oracle; small by construction for an honest factorization.
    pub fn residual_identity_error(&self, oracle: &mut dyn MatVecOracle) -> f64 {
        use crate::matrix::ColumnAccess;
        let n = self.basis.rows();
        let k = self.steps;
        let mut acc = 0.0;
        let mut xu = vec![0.0; n];
        for j in 0..k {
            oracle.apply(self.basis.col(j), &mut xu);
            // subtract U_k T_k column j
            axpy(-self.alphas[j], self.basis.col(j), &mut xu);
            if j > 0 {
                axpy(-self.betas[j - 1], self.basis.col(j - 1), &mut xu);
            }
            if j + 1 < k {
                axpy(-self.betas[j], self.basis.col(j + 1), &mut xu);
            }
            if j + 1 == k {
                axpy(-self.beta_last, &self.next_vector, &mut xu);
            }
            acc += dot(&xu, &xu);
        }
        sqrt(acc)
    }

    /// `max |U^T U - I|` over the stored basis.
    pub fn orthogonality_error(&self) -> f64 {
        use crate::matrix::ColumnAccess;
        let k = self.steps;
        let mut max = 0.0f64;
        for i in 0..k {
            for j in 0..=i {
                let d = dot(self.basis.col(i), self.basis.col(j));
                let want = if i == j { 1.0 } else { 0.0 };
                max = max.max((d - want).abs());
            }
        }
        max
    }
}

/// Incremental Lanczos state used by the convergence-checked drivers.
struct LanczosState {
    n: usize,
    basis: Vec<f64>, // column-major, grows by one column per step
    alphas: Vec<f64>,
    betas: Vec<f64>,
    u_curr: Vec<f64>,
    beta_last: f64,
    breakdown: bool,
}

impl LanczosState {
    fn new(u1: &[f64]) -> Result<Self> {
        let n = u1.len();
        let norm = norm2(u1);
        if !(norm > 0.0) {
            return Err(Error::Invalid("Lanczos start vector must be nonzero"));
        }
        let u: Vec<f64> = u1.iter().map(|x| x / norm).collect();
        Ok(LanczosState {
            n,
            basis: Vec::new(),
            alphas: Vec::new(),
            betas: Vec::new(),
            u_curr: u,
            beta_last: 0.0,
            breakdown: false,
        })
    }

    fn steps(&self) -> usize {
        self.alphas.len()
    }

    fn basis_col(&self, j: usize) -> &[f64] {
        &self.basis[j * self.n..(j + 1) * self.n]
    }

    /// One three-term step plus two-pass full reorthogonalization.
    fn step(&mut self, oracle: &mut dyn MatVecOracle) -> bool {
        if self.breakdown {
            return false;
        }
        let n = self.n;
        self.basis.extend_from_slice(&self.u_curr);
        let j = self.steps(); // index of the vector just stored
        let mut v = vec![0.0; n];
        oracle.apply(self.basis_col(j), &mut v);
        let alpha = dot(self.basis_col(j), &v);
        self.alphas.push(alpha);
        // Two-pass classical Gram-Schmidt against the whole basis; this
        // subsumes the three-term recurrence and keeps U_k orthonormal.
        for _pass in 0..2 {
            for i in (0..=j).rev() {
                let c = dot(self.basis_col(i), &v);
                // borrow split: copy the column head pointer manually
                let col_start = i * n;
                for t in 0..n {
                    v[t] -= c * self.basis[col_start + t];
                }
            }
        }
        let beta = norm2(&v);
        let scale = self.t_scale().max(1.0);
        if beta <= BREAKDOWN_TOL * scale {
            self.beta_last = 0.0;
            self.u_curr.fill(0.0);
            self.breakdown = true;
            return false;
        }
        self.betas.push(beta);
        self.beta_last = beta;
        for t in 0..n {
            self.u_curr[t] = v[t] / beta;
        }
        true
    }

    fn t_scale(&self) -> f64 {
        let a = self.alphas.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let b = self.betas.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        a.max(b)
    }

    fn into_factorization(mut self) -> LanczosFactorization {
        let k = self.steps();
        // betas holds one entry per completed step; T_k only uses k-1.
        let beta_last = if self.breakdown { 0.0 } else { self.beta_last };
        if self.betas.len() >= k && k > 0 {
            self.betas.truncate(k - 1);
        }
        let basis = DenseMatrix::from_column_major(self.n, k, self.basis)
            .expect("basis storage is consistent by construction");
        LanczosFactorization {
            basis,
            alphas: self.alphas,
            betas: self.betas,
            beta_last,
            next_vector: self.u_curr,
            breakdown: self.breakdown,
            steps: k,
        }
    }
}

/// Runs `k` Lanczos steps from `u1`; stops early (benignly) on breakdown.
pub fn lanczos(
    oracle: &mut dyn MatVecOracle,
    u1: &[f64],
    k: usize,
) -> Result<LanczosFactorization> {
    if u1.len() != oracle.dim() {
        return Err(Error::Dimension("start vector length must match oracle"));
    }
    if k == 0 || k > oracle.dim() {
        return Err(Error::Invalid("step count must satisfy 1 <= k <= n"));
    }
    let mut state = LanczosState::new(u1)?;
    for _ in 0..k {
        if !state.step(oracle) {
            break;
        }
    }
    Ok(state.into_factorization())
}

// ---------------------------------------------------------------------------
// Symmetric tridiagonal eigensolver: bisection + inverse iteration
// ---------------------------------------------------------------------------

/// Number of eigenvalues of `T` strictly below `x` (Sturm count via the
/// shifted LDL^T recurrence).
fn sturm_count(alphas: &[f64], betas: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = alphas[0] - x;
    if d < 0.0 {
        count += 1;
    }
    for i in 1..alphas.len() {
        let b2 = betas[i - 1] * betas[i - 1];
        let denom = if d.abs() < 1e-300 { 1e-300_f64.copysign(if d < 0.0 { -1.0 } else { 1.0 }) } else { d };
        d = (alphas[i] - x) - b2 / denom;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let k = alphas.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let mut r = 0.0;
        if i > 0 {
            r += betas[i - 1].abs();
        }
        if i < k - 1 {
            r += betas[i].abs();
        }
        lo = lo.min(alphas[i] - r);
        hi = hi.max(alphas[i] + r);
    }
    (lo, hi)
}

/// `idx`-th smallest eigenvalue (0-based) by bisection.
pub fn tridiag_eigenvalue(alphas: &[f64], betas: &[f64], idx: usize) -> f64 {
    debug_assert!(idx < alphas.len());
    let (mut lo, mut hi) = gershgorin(alphas, betas);
    if lo == hi {
        return lo;
    }
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(alphas, betas, mid) >= idx + 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-16 * hi.abs().max(lo.abs()).max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues, ascending.
pub fn tridiag_eigenvalues(alphas: &[f64], betas: &[f64]) -> Vec<f64> {
    (0..alphas.len()).map(|i| tridiag_eigenvalue(alphas, betas, i)).collect()
}

/// Eigenvector for an isolated eigenvalue by inverse iteration with a
/// partially pivoted tridiagonal solve.
pub fn tridiag_eigenvector(alphas: &[f64], betas: &[f64], lambda: f64) -> Vec<f64> {
    let k = alphas.len();
    if k == 1 {
        return vec![1.0];
    }
    // Deterministic, non-degenerate start.
    let mut rng = RngStream::new(0x7314_1d00);
    let mut v: Vec<f64> = (0..k).map(|_| 1.0 + 0.25 * rng.next_f64()).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let scale = alphas.iter().chain(betas.iter()).fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for _ in 0..3 {
        let w = solve_shifted_tridiag(alphas, betas, lambda, &v, scale);
        let nw = norm2(&w);
        if !(nw > 0.0) || !nw.is_finite() {
            break;
        }
        v = w;
        v.iter_mut().for_each(|x| *x /= nw);
    }
    v
}

/// Solves `(T - lambda I) w = b` with partial pivoting; near-singular pivots
/// are nudged so the solve blows up along the eigenvector, which is the
/// point of inverse iteration.
fn solve_shifted_tridiag(
    alphas: &[f64],
    betas: &[f64],
    lambda: f64,
    b: &[f64],
    scale: f64,
) -> Vec<f64> {
    let k = alphas.len();
    let tiny = 1e-300 + 1e-20 * scale;
    let mut diag: Vec<f64> = alphas.iter().map(|a| a - lambda).collect();
    // sup[i] = entry (i, i+1); sup2[i] = fill-in entry (i, i+2) from pivoting
    let mut sup = vec![0.0; k];
    for i in 0..k - 1 {
        sup[i] = betas[i];
    }
    let mut sup2 = vec![0.0; k];
    let mut rhs = b.to_vec();

    for i in 0..k - 1 {
        // entry (i+1, i); rows below i are untouched by earlier steps
        let below = betas[i];
        if below.abs() > diag[i].abs() {
            // swap rows i and i+1, then eliminate
            let row_i = (diag[i], sup[i], sup2[i]);
            let next_sup = if i + 1 < k - 1 { betas[i + 1] } else { 0.0 };
            diag[i] = below;
            sup[i] = diag[i + 1];
            sup2[i] = next_sup;
            let m = row_i.0 / diag[i];
            diag[i + 1] = row_i.1 - m * sup[i];
            if i + 1 < k - 1 {
                sup[i + 1] = row_i.2 - m * sup2[i];
            }
            rhs.swap(i, i + 1);
            let update = m * rhs[i];
            rhs[i + 1] -= update;
        } else {
            let piv = if diag[i].abs() < tiny {
                if diag[i] < 0.0 {
                    -tiny
                } else {
                    tiny
                }
            } else {
                diag[i]
            };
            diag[i] = piv;
            let m = below / piv;
            diag[i + 1] -= m * sup[i];
            if i + 1 < k - 1 {
                sup[i + 1] -= m * sup2[i];
            }
            rhs[i + 1] -= m * rhs[i];
        }
    }
    if diag[k - 1].abs() < tiny {
        diag[k - 1] = if diag[k - 1] < 0.0 { -tiny } else { tiny };
    }
    let mut w = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        if i + 1 < k {
            acc -= sup[i] * w[i + 1];
        }
        if i + 2 < k {
            acc -= sup2[i] * w[i + 2];
        }
        w[i] = acc / diag[i];
    }
    w
}

// ---------------------------------------------------------------------------
// Leading pair drivers
// ---------------------------------------------------------------------------

/// Approximate eigenpair extracted from a Krylov subspace.
#[derive(Debug, Clone)]
pub struct RitzPair {
    pub value: f64,
    /// Unit vector.
    pub vector: Vec<f64>,
    /// `||X v - theta v||_2`, recomputed from the oracle.
    pub residual: f64,
}

/// Which end of the spectrum a driver should chase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Extreme {
    Largest,
    LargestMagnitude,
}

struct DriverOutcome {
    pair: RitzPair,
    matvecs: usize,
}

/// Core restarted driver. Acceptance: true residual <= tol * max(|theta|,
/// scale_floor). Stagnation of the leading Ritz value triggers a fresh
/// random restart ("Lanczos solvers use random initial points").
fn extreme_eigpair(
    oracle: &mut dyn MatVecOracle,
    which: Extreme,
    tol: f64,
    scale_floor: f64,
    max_restarts: usize,
    rng: &mut RngStream,
) -> Result<DriverOutcome> {
    let n = oracle.dim();
    if !(tol > 0.0) {
        return Err(Error::Invalid("tolerance must be positive"));
    }
    let max_steps = n.min(MAX_STEPS_CAP);
    let mut matvecs = 0usize;
    let mut best: Option<RitzPair> = None;

    for _restart in 0..=max_restarts {
        let u1 = rng.unit_vector(n);
        let mut state = LanczosState::new(&u1)?;
        let mut last_theta = f64::NAN;
        let mut best_est = f64::INFINITY;
        let mut flat_checks = 0usize;
        loop {
            let progressed = state.step(oracle);
            matvecs += 1;
            let j = state.steps();
            let done_growing = !progressed || j >= max_steps;
            // check cadence: every step is cheap relative to a matvec here
            let (theta, tvec) = extreme_ritz(&state, which);
            let est = state.beta_last.abs() * tvec.last().map(|x| x.abs()).unwrap_or(1.0);
            let accept_scale = theta.abs().max(scale_floor);
            if est <= 0.5 * tol * accept_scale.max(1e-300) || done_growing {
                // form the Ritz vector and recompute the true residual
                let v = ritz_vector(&state, &tvec);
                let mut xv = vec![0.0; n];
                oracle.apply(&v, &mut xv);
                matvecs += 1;
                let mut r = 0.0;
                for i in 0..n {
                    let d = xv[i] - theta * v[i];
                    r += d * d;
                }
                let resid = sqrt(r);
                let pair = RitzPair { value: theta, vector: v, residual: resid };
                if resid <= tol * accept_scale.max(1e-300) {
                    return Ok(DriverOutcome { pair, matvecs });
                }
                match &best {
                    Some(b) if b.residual <= resid => {}
                    _ => best = Some(pair),
                }
                if done_growing {
                    break;
                }
            }
            // Stagnation: the leading Ritz value stops moving while the
            // residual estimate also stops improving.
            if est <= 0.9 * best_est {
                best_est = est;
                flat_checks = 0;
            } else if last_theta.is_finite() {
                let rel = (theta - last_theta).abs() / theta.abs().max(scale_floor).max(1e-300);
                if rel < tol / 10.0 {
                    flat_checks += 1;
                    if flat_checks >= 5 {
                        break;
                    }
                } else {
                    flat_checks = 0;
                }
            }
            last_theta = theta;
        }
    }
    let achieved = best.map(|b| b.residual).unwrap_or(f64::INFINITY);
    Err(Error::NotConverged { achieved_residual: achieved })
}

/// Extreme Ritz value of the current `T` plus its tridiagonal eigenvector.
fn extreme_ritz(state: &LanczosState, which: Extreme) -> (f64, Vec<f64>) {
    let k = state.steps();
    let alphas = &state.alphas;
    let betas = &state.betas[..k.saturating_sub(1)];
    let hi = tridiag_eigenvalue(alphas, betas, k - 1);
    let theta = match which {
        Extreme::Largest => hi,
        Extreme::LargestMagnitude => {
            let lo = tridiag_eigenvalue(alphas, betas, 0);
            if lo.abs() > hi.abs() {
                lo
            } else {
                hi
            }
        }
    };
    let tvec = tridiag_eigenvector(alphas, betas, theta);
    (theta, tvec)
}

fn ritz_vector(state: &LanczosState, tvec: &[f64]) -> Vec<f64> {
    let n = state.n;
    let mut v = vec![0.0; n];
    for (j, &c) in tvec.iter().enumerate() {
        axpy(c, state.basis_col(j), &mut v);
    }
    let nv = norm2(&v);
    if nv > 0.0 {
        v.iter_mut().for_each(|x| *x /= nv);
    }
    v
}

/// Leading (largest) eigenpair with relative residual `tol`, restarting from
/// fresh random vectors on stagnation. Returns the pair and the number of
/// matrix-vector products consumed.
pub fn leading_eigpair(
    oracle: &mut dyn MatVecOracle,
    tol: f64,
    max_restarts: usize,
    rng: &mut RngStream,
) -> Result<(RitzPair, usize)> {
    let out = extreme_eigpair(oracle, Extreme::Largest, tol, 0.0, max_restarts, rng)?;
    Ok((out.pair, out.matvecs))
}

/// `k` eigenpairs of largest magnitude via sequential deflation, sorted by
/// magnitude (descending). Residuals are recomputed against the original
/// oracle.
pub fn leading_magnitude_eigpairs(
    oracle: &mut dyn MatVecOracle,
    k: usize,
    tol: f64,
    max_restarts: usize,
    rng: &mut RngStream,
) -> Result<(Vec<RitzPair>, usize)> {
    let n = oracle.dim();
    if k > n {
        return Err(Error::Invalid("cannot extract more pairs than the dimension"));
    }
    let mut pairs: Vec<RitzPair> = Vec::with_capacity(k);
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut matvecs = 0usize;
    let mut scale = 0.0f64;
    for _ in 0..k {
        let out = {
            let mut deflated = DeflatedOracle::new(oracle, &vs);
            extreme_eigpair(&mut deflated, Extreme::LargestMagnitude, tol, scale, max_restarts, rng)?
        };
        matvecs += out.matvecs;
        let mut pair = out.pair;
        // residual against the original operator
        let mut xv = vec![0.0; n];
        oracle.apply(&pair.vector, &mut xv);
        matvecs += 1;
        let mut r = 0.0;
        for i in 0..n {
            let d = xv[i] - pair.value * pair.vector[i];
            r += d * d;
        }
        pair.residual = sqrt(r);
        scale = scale.max(pair.value.abs());
        vs.push(pair.vector.clone());
        pairs.push(pair);
    }
    Ok((pairs, matvecs))
}

/// One left singular triplet of a rectangular factor.
#[derive(Debug, Clone)]
pub struct SingularTriplet {
    pub sigma: f64,
    /// Left singular vector (length = rows of the factor).
    pub left: Vec<f64>,
    /// Gram-operator residual of the underlying Ritz pair.
    pub residual: f64,
}

/// Result of extracting `k` leading singular triplets.
#[derive(Debug, Clone)]
pub struct SingularSet {
    pub triplets: Vec<SingularTriplet>,
    /// True when the factor ran out of numerical rank before `k` triplets.
    pub rank_deficient: bool,
    pub matvecs: usize,
}

impl SingularSet {
    pub fn sigma_sum(&self) -> f64 {
        self.triplets.iter().map(|t| t.sigma).sum()
    }
}

/// `k` leading left singular triplets of `s` via Lanczos on the Gram
/// operator `u -> S (S^T u)` (cost `2 m s` per product), with sequential
/// deflation for the trailing directions.
pub fn leading_singular(
    s: &DenseMatrix,
    k: usize,
    tol: f64,
    max_restarts: usize,
    rng: &mut RngStream,
) -> Result<SingularSet> {
    use crate::matrix::ColumnAccess;
    let m = s.rows();
    if k == 0 || k > m.min(s.cols()) {
        return Err(Error::Invalid("need 1 <= k <= min(rows, cols)"));
    }
    let mut oracle = GramOracle::new(s);
    let mut triplets: Vec<SingularTriplet> = Vec::with_capacity(k);
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut matvecs = 0usize;
    let mut theta1 = 0.0f64;
    let mut rank_deficient = false;
    for i in 0..k {
        let out = {
            let mut deflated = DeflatedOracle::new(&mut oracle, &vs);
            extreme_eigpair(&mut deflated, Extreme::Largest, tol, theta1, max_restarts, rng)?
        };
        matvecs += out.matvecs;
        let pair = out.pair;
        if i == 0 {
            theta1 = pair.value.abs().max(1e-300);
        }
        if pair.value <= 1e-12 * theta1 {
            rank_deficient = true;
            break;
        }
        let sigma = sqrt(pair.value.max(0.0));
        vs.push(pair.vector.clone());
        triplets.push(SingularTriplet { sigma, left: pair.vector, residual: pair.residual });
    }
    Ok(SingularSet { triplets, rank_deficient, matvecs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiag_bisection_matches_known_spectrum() {
        // T = tridiag(beta=1, alpha=0): eigenvalues 2 cos(pi i / (k+1))
        let k = 12;
        let alphas = vec![0.0; k];
        let betas = vec![1.0; k - 1];
        let got = tridiag_eigenvalues(&alphas, &betas);
        for (i, g) in got.iter().enumerate() {
            let want = 2.0 * (core::f64::consts::PI * (k - i) as f64 / (k as f64 + 1.0)).cos();
            assert!((g - want).abs() < 1e-12, "{g} vs {want}");
        }
    }

    #[test]
    fn tridiag_eigenvector_is_accurate() {
        let alphas = vec![2.0, -1.0, 0.5, 3.0, 0.0];
        let betas = vec![0.7, 0.2, 1.1, 0.4];
        let vals = tridiag_eigenvalues(&alphas, &betas);
        for &lam in &vals {
            let v = tridiag_eigenvector(&alphas, &betas, lam);
            // residual of (T - lam I) v
            let k = alphas.len();
            let mut r = 0.0f64;
            for i in 0..k {
                let mut acc = (alphas[i] - lam) * v[i];
                if i > 0 {
                    acc += betas[i - 1] * v[i - 1];
                }
                if i + 1 < k {
                    acc += betas[i] * v[i + 1];
                }
                r += acc * acc;
            }
            assert!(sqrt(r) < 1e-9, "residual {} for lambda {lam}", sqrt(r));
        }
    }
}
