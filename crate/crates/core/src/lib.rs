//! Subsampling kernels for large-scale spectral optimization.
//!
//! The crate has three layers:
//!
//! * [`sampling`] — randomized matrix-product and low-rank approximation
//!   kernels built on column sampling, together with the sampling-rate
//!   formulas that control their error.
//! * [`krylov`] and [`jacobi`] — Lanczos extraction of leading eigen/singular
//!   pairs (the only dense operation the solver needs per iteration) and a
//!   cyclic Jacobi eigensolver used as the exact baseline.
//! * [`solver`] and [`problems`] — a stochastic approximation solver for
//!   minimizing the spectral norm (or the sum of the k largest singular
//!   values) of an affine matrix family over a simple convex set, plus
//!   builders for concrete problem instances.
//!
//! Everything is deterministic given an [`rng::RngStream`] seed, and the
//! crate is `no_std` compatible (with `alloc`) so the numerical layer can be
//! embedded anywhere; IO, file formats and the CLI live in the companion
//! `specsub` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod geometry;
pub mod jacobi;
pub mod krylov;
pub mod matrix;
pub mod problem;
pub mod problems;
pub mod rng;
pub mod sampling;
mod scalar;
pub mod solver;

pub use matrix::{DenseMatrix, SparseMatrix, SymMatrix};
pub use rng::RngStream;

use core::fmt;

/// Errors shared across the numerical layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Every sampling weight is zero; the sketched object is the zero matrix.
    AllZero,
    /// The sketch Gram matrix has fewer usable eigenvalues than requested.
    RankDeficientSketch { requested: usize, available: usize },
    /// An iterative eigensolver exhausted its restart budget.
    NotConverged { achieved_residual: f64 },
    /// Matrix dimension exceeds the configured dense-solver cap.
    DimensionCap { dim: usize, cap: usize },
    /// A sampling-rate formula exceeded the configured cap.
    RateOverflow { value: f64, cap: usize },
    /// Mismatched or empty matrix dimensions.
    Dimension(&'static str),
    /// The doubling rate search hit the column budget without certifying.
    CapReached { best_gap: f64 },
    /// The input graph is not connected.
    DisconnectedGraph,
    /// Invalid configuration or argument value.
    Invalid(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::AllZero => write!(f, "all sampling weights are zero"),
            Error::RankDeficientSketch { requested, available } => write!(
                f,
                "sketch is rank deficient: requested {requested} directions, {available} available"
            ),
            Error::NotConverged { achieved_residual } => {
                write!(f, "eigensolver did not converge (residual {achieved_residual:.3e})")
            }
            Error::DimensionCap { dim, cap } => {
                write!(f, "dimension {dim} exceeds dense solver cap {cap}")
            }
            Error::RateOverflow { value, cap } => {
                write!(f, "sampling rate {value:.3e} exceeds cap {cap}")
            }
            Error::Dimension(msg) => write!(f, "dimension error: {msg}"),
            Error::CapReached { best_gap } => {
                write!(f, "rate search hit the column cap (best gap {best_gap:.3e})")
            }
            Error::DisconnectedGraph => write!(f, "graph is not connected"),
            Error::Invalid(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
