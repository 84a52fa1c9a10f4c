//! Euclidean prox geometries for the feasible sets the solver supports.
//!
//! All shipped geometries use the distance generating function
//! `omega(y) = ||y||_2^2 / 2` (strong convexity modulus 1, norm ratio
//! `delta_* = 1`), so the prox mapping is a Euclidean projection. The
//! interface still carries `alpha` and `delta_star` per geometry so
//! non-Euclidean setups can slot in.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::norm2;
use crate::rng::RngStream;
use crate::scalar::sqrt;
use crate::{Error, Result};

/// Feasible set with its prox machinery.
#[derive(Debug, Clone)]
pub enum ProxGeometry {
    /// `{ y : |y_i| <= radius }`
    Box { radius: f64, dim: usize },
    /// `{ y : ||y||_2 <= radius }`
    Ball { radius: f64, dim: usize },
    /// `{ y : ||diag(design) y - response||_2 <= sigma }` (diagonal design,
    /// all entries nonzero)
    Ellipsoid { design: Vec<f64>, response: Vec<f64>, sigma: f64 },
    /// Edge weights of a transition matrix:
    /// `{ y >= 0, sum_{e incident to i} y_e <= 1 for every vertex i }`
    Fmmc { vertices: usize, vertex_edges: Vec<Vec<usize>>, dim: usize },
}

impl ProxGeometry {
    pub fn ball(radius: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Invalid("ball radius must be positive"));
        }
        Ok(ProxGeometry::Ball { radius, dim })
    }

    pub fn boxed(radius: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Invalid("box radius must be positive"));
        }
        Ok(ProxGeometry::Box { radius, dim })
    }

    pub fn ellipsoid(design: Vec<f64>, response: Vec<f64>, sigma: f64) -> Result<Self> {
        if design.len() != response.len() {
            return Err(Error::Dimension("design and response lengths differ"));
        }
        if design.iter().any(|d| *d == 0.0 || !d.is_finite()) {
            return Err(Error::Invalid("diagonal design entries must be nonzero"));
        }
        if !(sigma >= 0.0) {
            return Err(Error::Invalid("residual radius must be nonnegative"));
        }
        Ok(ProxGeometry::Ellipsoid { design, response, sigma })
    }

    pub fn fmmc(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut vertex_edges = vec![Vec::new(); vertices];
        for (e, &(i, j)) in edges.iter().enumerate() {
            if i >= vertices || j >= vertices || i == j {
                return Err(Error::Invalid("edge endpoints must be distinct vertices"));
            }
            vertex_edges[i].push(e);
            vertex_edges[j].push(e);
        }
        Ok(ProxGeometry::Fmmc { vertices, vertex_edges, dim: edges.len() })
    }

    pub fn dim(&self) -> usize {
        match self {
            ProxGeometry::Box { dim, .. } | ProxGeometry::Ball { dim, .. } => *dim,
            ProxGeometry::Ellipsoid { design, .. } => design.len(),
            ProxGeometry::Fmmc { dim, .. } => *dim,
        }
    }

    /// Strong convexity modulus of omega.
    pub fn alpha(&self) -> f64 {
        1.0
    }

    /// Norm-ratio constant `delta_*(p)`; 1 for the Euclidean norm.
    pub fn delta_star(&self) -> f64 {
        1.0
    }

    /// Distance generating function `omega(y) = ||y||^2 / 2`.
    pub fn omega(&self, y: &[f64]) -> f64 {
        0.5 * y.iter().map(|v| v * v).sum::<f64>()
    }

    /// `D_{omega,Q} = (max omega - min omega)^(1/2)` (upper bound for the
    /// FMMC and ellipsoid sets, which is the conservative direction for the
    /// step-size and iteration-count formulas).
    pub fn diameter(&self) -> f64 {
        match self {
            ProxGeometry::Box { radius, dim } => radius * sqrt(*dim as f64 / 2.0),
            ProxGeometry::Ball { radius, .. } => radius / sqrt(2.0),
            ProxGeometry::Ellipsoid { design, response, sigma } => {
                let center_norm_sq: f64 =
                    design.iter().zip(response).map(|(d, r)| (r / d) * (r / d)).sum();
                let dmin = design.iter().fold(f64::INFINITY, |a, d| a.min(d.abs()));
                (sqrt(center_norm_sq) + sigma / dmin) / sqrt(2.0)
            }
            ProxGeometry::Fmmc { vertices, dim, .. } => {
                // sum y_e^2 <= sum y_e <= min(m, n/2)
                sqrt(0.5 * (*dim as f64).min(*vertices as f64 / 2.0))
            }
        }
    }

    /// Canonical feasible starting point.
    pub fn initial_point(&self) -> Vec<f64> {
        match self {
            ProxGeometry::Box { dim, .. } | ProxGeometry::Ball { dim, .. } => vec![0.0; *dim],
            ProxGeometry::Ellipsoid { design, response, .. } => {
                design.iter().zip(response).map(|(d, r)| r / d).collect()
            }
            ProxGeometry::Fmmc { dim, .. } => vec![0.0; *dim],
        }
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        if y.len() != self.dim() {
            return false;
        }
        match self {
            ProxGeometry::Box { radius, .. } => y.iter().all(|v| v.abs() <= radius + tol),
            ProxGeometry::Ball { radius, .. } => norm2(y) <= radius + tol,
            ProxGeometry::Ellipsoid { design, response, sigma } => {
                let r: f64 = design
                    .iter()
                    .zip(response)
                    .zip(y)
                    .map(|((d, r), v)| {
                        let t = d * v - r;
                        t * t
                    })
                    .sum();
                sqrt(r) <= sigma + tol
            }
            ProxGeometry::Fmmc { vertex_edges, .. } => {
                y.iter().all(|v| *v >= -tol)
                    && vertex_edges
                        .iter()
                        .all(|es| es.iter().map(|&e| y[e]).sum::<f64>() <= 1.0 + tol)
            }
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        match self {
            ProxGeometry::Box { radius, .. } => {
                z.iter().map(|v| v.clamp(-radius, *radius)).collect()
            }
            ProxGeometry::Ball { radius, .. } => {
                let n = norm2(z);
                if n <= *radius {
                    z.to_vec()
                } else {
                    z.iter().map(|v| v * radius / n).collect()
                }
            }
            ProxGeometry::Ellipsoid { design, response, sigma } => {
                project_ellipsoid(design, response, *sigma, z)
            }
            ProxGeometry::Fmmc { vertex_edges, .. } => project_fmmc(vertex_edges, z),
        }
    }

    /// Prox mapping for Euclidean omega: `argmin_z g^T(z - y) + V(y, z)` is
    /// the projection of `y - g` (with `g` already scaled by the step size).
    pub fn prox_step(&self, y: &[f64], scaled_grad: &[f64]) -> Vec<f64> {
        let shifted: Vec<f64> = y.iter().zip(scaled_grad).map(|(a, g)| a - g).collect();
        self.project(&shifted)
    }

    /// Support function `S_Q(w) = max_{y in Q} w^T y`.
    ///
    /// Exact for box, ball and ellipsoid. For the FMMC set the exact value
    /// is a fractional matching LP; this returns the cheap dual-feasible
    /// upper bound `min(sum_e w_e^+, 1/2 sum_i max_{e at i} w_e^+)`, which
    /// keeps weak duality intact (the reported gap can only grow).
    pub fn support(&self, w: &[f64]) -> f64 {
        match self {
            ProxGeometry::Box { radius, .. } => {
                radius * w.iter().map(|v| v.abs()).sum::<f64>()
            }
            ProxGeometry::Ball { radius, .. } => radius * norm2(w),
            ProxGeometry::Ellipsoid { design, response, sigma } => {
                let mut lin = 0.0;
                let mut quad = 0.0;
                for ((d, r), wi) in design.iter().zip(response).zip(w) {
                    lin += wi * r / d;
                    let t = wi / d;
                    quad += t * t;
                }
                lin + sigma * sqrt(quad)
            }
            ProxGeometry::Fmmc { vertex_edges, .. } => {
                let plain: f64 = w.iter().map(|v| v.max(0.0)).sum();
                let cover: f64 = 0.5
                    * vertex_edges
                        .iter()
                        .map(|es| es.iter().fold(0.0f64, |a, &e| a.max(w[e].max(0.0))))
                        .sum::<f64>();
                plain.min(cover)
            }
        }
    }

    /// A uniformly-ish distributed feasible point, exactly feasible by
    /// construction; used for probing and duality checks.
    pub fn sample_feasible(&self, rng: &mut RngStream) -> Vec<f64> {
        match self {
            ProxGeometry::Box { radius, dim } => {
                (0..*dim).map(|_| (2.0 * rng.next_f64() - 1.0) * radius).collect()
            }
            ProxGeometry::Ball { radius, dim } => {
                let dir = rng.unit_vector(*dim);
                let r = radius * rng.next_f64();
                dir.iter().map(|v| v * r).collect()
            }
            ProxGeometry::Ellipsoid { design, response, sigma } => {
                let p = design.len();
                let dir = rng.unit_vector(p);
                let r = sigma * rng.next_f64();
                design
                    .iter()
                    .zip(response)
                    .zip(dir)
                    .map(|((d, resp), u)| (resp + r * u) / d)
                    .collect()
            }
            ProxGeometry::Fmmc { vertex_edges, dim, .. } => {
                let raw: Vec<f64> = (0..*dim).map(|_| rng.next_f64()).collect();
                let worst = vertex_edges
                    .iter()
                    .map(|es| es.iter().map(|&e| raw[e]).sum::<f64>())
                    .fold(0.0f64, f64::max);
                let scale = if worst > 0.0 { 0.999 / worst.max(1.0) } else { 0.0 };
                raw.iter().map(|v| v * scale).collect()
            }
        }
    }
}

/// Projection onto `||D y - r|| <= sigma` for diagonal `D`: Lagrangian
/// coordinates `y_i(mu) = (z_i + mu d_i r_i) / (1 + mu d_i^2)` with `mu`
/// found by safeguarded bisection on the residual.
fn project_ellipsoid(design: &[f64], response: &[f64], sigma: f64, z: &[f64]) -> Vec<f64> {
    let resid = |y: &[f64]| -> f64 {
        sqrt(
            design
                .iter()
                .zip(response)
                .zip(y)
                .map(|((d, r), v)| {
                    let t = d * v - r;
                    t * t
                })
                .sum::<f64>(),
        )
    };
    if resid(z) <= sigma {
        return z.to_vec();
    }
    if sigma == 0.0 {
        return design.iter().zip(response).map(|(d, r)| r / d).collect();
    }
    let eval = |mu: f64| -> (Vec<f64>, f64) {
        let y: Vec<f64> = design
            .iter()
            .zip(response)
            .zip(z)
            .map(|((d, r), zi)| (zi + mu * d * r) / (1.0 + mu * d * d))
            .collect();
        let r = resid(&y);
        (y, r)
    };
    // bracket: residual decreases monotonically to 0 as mu -> infinity
    let mut lo = 0.0;
    let mut hi = 1.0;
    while eval(hi).1 > sigma {
        hi *= 4.0;
        if hi > 1e18 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid).1 > sigma {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    eval(hi).0
}

/// Dykstra's alternating projections for the FMMC set: the nonnegative
/// orthant plus one halfspace per vertex (`sum of incident weights <= 1`),
/// each with a closed-form projection. 1e-10 stop, 500-sweep cap.
fn project_fmmc(vertex_edges: &[Vec<usize>], z: &[f64]) -> Vec<f64> {
    let m = z.len();
    let sets = 1 + vertex_edges.len();
    let mut x = z.to_vec();
    let mut corrections = vec![vec![0.0; m]; sets];
    for _sweep in 0..500 {
        let mut max_change = 0.0f64;
        for (k, corr) in corrections.iter_mut().enumerate() {
            if k == 0 {
                // nonnegative orthant
                for e in 0..m {
                    let w = x[e] + corr[e];
                    let nx = w.max(0.0);
                    corr[e] = w - nx;
                    max_change = max_change.max((nx - x[e]).abs());
                    x[e] = nx;
                }
            } else {
                // halfspace of one vertex; the correction is supported on
                // its incident edges only
                let edges = &vertex_edges[k - 1];
                if edges.is_empty() {
                    continue;
                }
                let total: f64 = edges.iter().map(|&e| x[e] + corr[e]).sum();
                let viol = ((total - 1.0) / edges.len() as f64).max(0.0);
                for &e in edges {
                    let w = x[e] + corr[e];
                    let nx = w - viol;
                    corr[e] = viol;
                    max_change = max_change.max((nx - x[e]).abs());
                    x[e] = nx;
                }
            }
        }
        if max_change <= 1e-10 {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_projection_clips() {
        let g = ProxGeometry::boxed(1.0, 1).unwrap();
        // y = 0.5, step 1.0 -> clip(-0.5) = -0.5
        let out = g.prox_step(&[0.5], &[1.0]);
        assert_eq!(out, vec![-0.5]);
        // zero gradient is a fixed point
        assert_eq!(g.prox_step(&[0.5], &[0.0]), vec![0.5]);
    }

    #[test]
    fn ball_projection_rescales() {
        let g = ProxGeometry::ball(2.0, 2).unwrap();
        let out = g.project(&[3.0, 4.0]);
        let n = norm2(&out);
        assert!((n - 2.0).abs() < 1e-12);
        assert!((out[0] / out[1] - 3.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn ellipsoid_projection_feasible_and_fixed() {
        let g = ProxGeometry::ellipsoid(vec![1.0, 2.0], vec![1.0, -1.0], 0.5).unwrap();
        let inside = g.initial_point();
        assert_eq!(g.project(&inside), inside);
        let far = vec![10.0, -10.0];
        let proj = g.project(&far);
        assert!(g.contains(&proj, 1e-9));
        // projection lands on the boundary
        if let ProxGeometry::Ellipsoid { design, response, sigma } = &g {
            let r: f64 = design
                .iter()
                .zip(response)
                .zip(&proj)
                .map(|((d, rr), v)| {
                    let t = d * v - rr;
                    t * t
                })
                .sum();
            assert!((sqrt(r) - sigma).abs() < 1e-6);
        }
    }

    #[test]
    fn support_functions_match_closed_forms() {
        let b = ProxGeometry::boxed(0.5, 3).unwrap();
        assert!((b.support(&[1.0, -2.0, 0.0]) - 1.5).abs() < 1e-14);
        let s = ProxGeometry::ball(2.0, 2).unwrap();
        assert!((s.support(&[3.0, 4.0]) - 10.0).abs() < 1e-14);
    }

    #[test]
    fn support_dominates_inner_products_on_samples() {
        let mut rng = RngStream::new(17);
        let geoms = [
            ProxGeometry::boxed(0.7, 5).unwrap(),
            ProxGeometry::ball(1.3, 5).unwrap(),
            ProxGeometry::ellipsoid(vec![1.0, -0.5, 2.0, 1.5, 0.3], vec![0.2; 5], 0.8).unwrap(),
            ProxGeometry::fmmc(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap(),
        ];
        for g in &geoms {
            for _ in 0..200 {
                let y = g.sample_feasible(&mut rng);
                assert!(g.contains(&y, 1e-9));
                let w: alloc::vec::Vec<f64> =
                    (0..g.dim()).map(|_| rng.next_gaussian()).collect();
                let lhs: f64 = w.iter().zip(&y).map(|(a, b)| a * b).sum();
                assert!(lhs <= g.support(&w) + 1e-9, "support violated");
            }
        }
    }

    #[test]
    fn fmmc_projection_feasibility_and_identity() {
        let g = ProxGeometry::fmmc(4, &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let mut rng = RngStream::new(23);
        for _ in 0..100 {
            let z: alloc::vec::Vec<f64> =
                (0..g.dim()).map(|_| 1.5 * rng.next_gaussian()).collect();
            let p = g.project(&z);
            assert!(g.contains(&p, 1e-8), "projection infeasible: {p:?}");
            // projecting a feasible point returns it
            let y = g.sample_feasible(&mut rng);
            let py = g.project(&y);
            let dist: f64 = y.iter().zip(&py).map(|(a, b)| (a - b) * (a - b)).sum();
            assert!(sqrt(dist) <= 1e-10, "feasible point moved by {}", sqrt(dist));
        }
    }

    #[test]
    fn prox_output_always_feasible_and_bregman_lower_bound() {
        // V(x, y) >= (alpha/2) ||y - x||^2 holds with equality for the
        // Euclidean distance generating function.
        let g = ProxGeometry::boxed(1.0, 4).unwrap();
        let mut rng = RngStream::new(31);
        for _ in 0..100 {
            let x = g.sample_feasible(&mut rng);
            let y = g.sample_feasible(&mut rng);
            let v = g.omega(&y)
                - g.omega(&x)
                - x.iter().zip(&y).map(|(xi, yi)| xi * (yi - xi)).sum::<f64>();
            let half_dist: f64 =
                0.5 * x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            assert!(v >= half_dist - 1e-12);
        }
    }
}
