//! Experiment harness: sketch-quality figures, eigensolver speedups,
//! convergence traces and CPU tables, all emitted as raw CSV rows so every
//! summary statistic can be recomputed offline.

use std::time::Instant;

use anyhow::{bail, Result};
use rayon::prelude::*;
use specsub_core::krylov::{leading_magnitude_eigpairs, leading_singular, DenseSymOracle};
use specsub_core::problems::{build_collab_filter, build_spectral_box, CollabFilterInstance};
use specsub_core::sampling::{column_probs, column_subsample_with, eta};
use specsub_core::solver::{solve, SolveStatus, SolverConfig, SolverRun, TraceRecord};
use specsub_core::{RngStream, SymMatrix};

use crate::gen::{random_spectrum_matrix, GeneratedMatrix, SpectrumLaw, SpectrumSpec};
use crate::threads;

/// Default beta-law sweep for the error-versus-rank experiments (the paper
/// varies the exponents without naming them).
pub const BETA_SWEEP: [(f64, f64); 9] = [
    (0.5, 1.0),
    (0.5, 3.0),
    (0.5, 10.0),
    (1.0, 1.0),
    (1.0, 3.0),
    (1.0, 10.0),
    (2.0, 1.0),
    (2.0, 3.0),
    (2.0, 10.0),
];

/// i.i.d. beta spectra cannot reach numerical ranks below ~13 at n = 500,
/// so the sweep adds spiked-plus-noise covariances to populate the low end
/// of the rank axis.
pub const RANK_SWEEP: [usize; 4] = [2, 4, 8, 16];

fn rank_sweep_laws(trials: usize) -> Vec<(String, SpectrumLaw)> {
    let mut laws = Vec::new();
    for &(a, b) in BETA_SWEEP.iter() {
        laws.push((format!("beta:{a}:{b}"), SpectrumLaw::Beta { a, b }));
    }
    for &r in RANK_SWEEP.iter() {
        laws.push((format!("rank:{r}:0.07"), SpectrumLaw::RankPlusNoise { rank: r, noise: 0.07 }));
    }
    let _ = trials;
    laws
}

/// Shared knobs for the bench experiments.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub trials: usize,
    /// Sampling ratios `s / n` where an experiment sweeps them.
    pub ratios: Vec<f64>,
    /// Confidence used for eta in the theoretical-bound columns (0.01 = 99%).
    pub confidence: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(n: usize, trials: usize, seed: u64) -> Result<Self> {
        if trials == 0 {
            bail!("trials must be >= 1");
        }
        Ok(ExperimentConfig {
            n,
            trials,
            ratios: vec![0.04, 0.08, 0.16, 0.32, 0.64],
            confidence: 0.01,
            seed,
        })
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in &pts {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

pub fn median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Sketch spectral norm of a generated matrix at rate `s`; the exact norm
/// comes from the known spectrum.
fn sketch_rel_error(g: &GeneratedMatrix, s: usize, rng: &mut RngStream) -> Result<f64> {
    let dist = column_probs(&g.matrix).map_err(|e| anyhow::anyhow!("{e}"))?;
    let sk = column_subsample_with(&g.matrix, &dist, s, rng).map_err(|e| anyhow::anyhow!("{e}"))?;
    let set = leading_singular(&sk.matrix, 1, 1e-8, 6, rng).map_err(|e| anyhow::anyhow!("{e}"))?;
    let exact = g.spectral_norm();
    Ok((set.triplets[0].sigma - exact).abs() / exact)
}

#[derive(Debug, Clone)]
pub struct ErrVsRankRow {
    pub matrix_id: usize,
    pub law: String,
    pub numrank: f64,
    pub rel_error: f64,
    /// `rel_error / (eta NumRank / sqrt(s))`, the Fig-1-right histogram
    /// statistic.
    pub bound_ratio: f64,
}

/// Relative sketch error at 20% subsampling across a numerical-rank sweep.
pub fn run_err_vs_rank(cfg: &ExperimentConfig) -> Result<Vec<ErrVsRankRow>> {
    let s = ((0.2 * cfg.n as f64).ceil() as usize).max(1);
    let eta_v = eta(cfg.confidence).map_err(|e| anyhow::anyhow!("{e}"))?;
    let root = RngStream::new(cfg.seed);
    let jobs: Vec<(usize, String, SpectrumLaw)> = rank_sweep_laws(cfg.trials)
        .into_iter()
        .flat_map(|(name, law)| {
            (0..cfg.trials).map(move |_| (name.clone(), law.clone()))
        })
        .enumerate()
        .map(|(id, (name, law))| (id, name, law))
        .collect();
    let rows: Result<Vec<ErrVsRankRow>> = threads::pool().install(|| {
        jobs.par_iter()
            .map(|(id, name, law)| {
                let mut rng = root.split(*id as u64);
                let spec = SpectrumSpec { n: cfg.n, law: law.clone(), scale: 1.0 };
                let g = random_spectrum_matrix(&spec, &mut rng)?;
                let numrank = g.numerical_rank();
                let rel_error = sketch_rel_error(&g, s, &mut rng)?;
                let bound = eta_v * numrank / (s as f64).sqrt();
                Ok(ErrVsRankRow {
                    matrix_id: *id,
                    law: name.clone(),
                    numrank,
                    rel_error,
                    bound_ratio: rel_error / bound,
                })
            })
            .collect()
    });
    rows
}

#[derive(Debug, Clone)]
pub struct ErrVsSRow {
    pub s: usize,
    pub trial: usize,
    pub rel_error: f64,
}

/// Relative sketch error against the sampling rate on one power-law
/// covariance fixture.
pub fn run_err_vs_s(cfg: &ExperimentConfig) -> Result<Vec<ErrVsSRow>> {
    let mut rng = RngStream::new(cfg.seed);
    let spec = SpectrumSpec {
        n: cfg.n,
        law: SpectrumLaw::Beta { a: 1.0, b: 3.0 },
        scale: 1.0,
    };
    let fixture = random_spectrum_matrix(&spec, &mut rng)?;
    let root = RngStream::new(cfg.seed ^ 0x5eed);
    let mut jobs = Vec::new();
    for &ratio in &cfg.ratios {
        let s = ((ratio * cfg.n as f64).ceil() as usize).clamp(1, cfg.n);
        for trial in 0..cfg.trials {
            jobs.push((s, trial));
        }
    }
    let rows: Result<Vec<ErrVsSRow>> = threads::pool().install(|| {
        jobs.par_iter()
            .map(|&(s, trial)| {
                let mut rng = root.split((s * 1_000_003 + trial) as u64);
                let rel_error = sketch_rel_error(&fixture, s, &mut rng)?;
                Ok(ErrVsSRow { s, trial, rel_error })
            })
            .collect()
    });
    rows
}

/// Median per-rate relative error, for the Fig-2 slope fit.
pub fn median_error_per_rate(rows: &[ErrVsSRow]) -> Vec<(f64, f64)> {
    let mut rates: Vec<usize> = rows.iter().map(|r| r.s).collect();
    rates.sort_unstable();
    rates.dedup();
    rates
        .into_iter()
        .map(|s| {
            let mut errs: Vec<f64> =
                rows.iter().filter(|r| r.s == s).map(|r| r.rel_error).collect();
            (s as f64, median(&mut errs))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct EigSpeedupRow {
    pub ratio: f64,
    pub trial: usize,
    pub t_exact_s: f64,
    pub t_sketch_s: f64,
    pub speedup: f64,
    /// Entries touched per Lanczos product: n^2 exact vs 2 n s sketched.
    pub exact_product_cost: u64,
    pub sketch_product_cost: u64,
}

/// Wall-time ratio of exact versus sketch-then-solve leading pairs.
/// Timing runs are sequential regardless of the thread setting.
pub fn run_eig_speedup(cfg: &ExperimentConfig) -> Result<Vec<EigSpeedupRow>> {
    let mut rng = RngStream::new(cfg.seed);
    let spec = SpectrumSpec {
        n: cfg.n,
        law: SpectrumLaw::Beta { a: 1.0, b: 3.0 },
        scale: 1.0,
    };
    let fixture = random_spectrum_matrix(&spec, &mut rng)?;
    let n = cfg.n;
    let mut rows = Vec::new();
    for &ratio in &cfg.ratios {
        let s = ((ratio * n as f64).ceil() as usize).clamp(1, n);
        for trial in 0..cfg.trials {
            let mut rng = RngStream::new(cfg.seed).split((trial * 7919) as u64 ^ s as u64);
            let t0 = Instant::now();
            let mut oracle = DenseSymOracle::new(&fixture.matrix);
            let (_, mv_exact) =
                leading_magnitude_eigpairs(&mut oracle, 1, 1e-8, 6, &mut rng)
                    .map_err(|e| anyhow::anyhow!("{e}"))?;
            let t_exact = t0.elapsed().as_secs_f64();

            let t1 = Instant::now();
            let dist = column_probs(&fixture.matrix).map_err(|e| anyhow::anyhow!("{e}"))?;
            let sk = column_subsample_with(&fixture.matrix, &dist, s, &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let set = leading_singular(&sk.matrix, 1, 1e-8, 6, &mut rng)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let t_sketch = t1.elapsed().as_secs_f64();

            rows.push(EigSpeedupRow {
                ratio,
                trial,
                t_exact_s: t_exact,
                t_sketch_s: t_sketch,
                speedup: t_exact / t_sketch,
                exact_product_cost: (mv_exact as u64) * (n as u64) * (n as u64),
                sketch_product_cost: (set.matvecs as u64) * 2 * (n as u64) * (s as u64),
            });
        }
    }
    Ok(rows)
}

/// The section-4.5 collaborative filtering fixture: discrete features
/// V in {0,1,2}^(n x 3), X = V V^T, 30% of the cells observed, k = 4.
pub fn collab_fixture(n: usize, seed: u64) -> Result<CollabFilterInstance> {
    let mut rng = RngStream::new(seed);
    let mut truth = SymMatrix::zeros(n);
    let v: Vec<[f64; 3]> = (0..n)
        .map(|_| {
            [
                rng.next_usize(3) as f64,
                rng.next_usize(3) as f64,
                rng.next_usize(3) as f64,
            ]
        })
        .collect();
    for j in 0..n {
        for i in 0..=j {
            let dot: f64 = (0..3).map(|t| v[i][t] * v[j][t]).sum();
            truth.set_sym(i, j, dot);
        }
    }
    let mut ratings = Vec::new();
    for j in 0..n {
        for i in 0..=j {
            if rng.next_f64() < 0.3 {
                ratings.push((i, j, truth.get(i, j)));
            }
        }
    }
    // small per-entry freedom keeps the k-sum certificate plateau low (the
    // leading singular values coalesce at these optima)
    let radius = 0.04 * truth.max_abs();
    build_collab_filter(n, &ratings, 4, radius, false).map_err(|e| anyhow::anyhow!("{e}"))
}

/// Spectral-box benchmark fixture: a low-numerical-rank covariance with a
/// per-entry box.
pub fn spectral_box_fixture(
    n: usize,
    seed: u64,
) -> Result<specsub_core::problems::SpectralBoxInstance> {
    let spec = SpectrumSpec {
        n,
        law: SpectrumLaw::RankPlusNoise { rank: 3, noise: 0.05 },
        scale: 4.0,
    };
    let g = random_spectrum_matrix(&spec, &mut RngStream::new(seed))?;
    let rho = 0.4 / n as f64;
    build_spectral_box(&g.matrix, rho).map_err(|e| anyhow::anyhow!("{e}"))
}

/// One timed solver run; `deterministic` means full sampling rates
/// (s1 = n, s2 = n^2).
pub struct TimedRun {
    pub run: SolverRun,
    pub wall_s: f64,
    pub certified: bool,
    pub trace: Vec<(TraceRecord, f64)>,
}

#[allow(clippy::too_many_arguments)]
pub fn timed_solve(
    problem: &specsub_core::problem::AffineSpectralProblem,
    geometry: &specsub_core::geometry::ProxGeometry,
    eps: f64,
    s1: usize,
    s2: usize,
    seed: u64,
    max_iters: usize,
    keep_trace: bool,
) -> Result<TimedRun> {
    let mut config = SolverConfig::new(eps, 0.25, s1, s2, seed);
    config.max_iters = max_iters;
    config.gap_check_interval = Some(50);
    let start = Instant::now();
    let mut trace = Vec::new();
    let run = {
        let mut obs = |r: &TraceRecord, _y: &[f64]| {
            if keep_trace {
                trace.push((r.clone(), start.elapsed().as_secs_f64()));
            }
        };
        solve(problem, geometry, &config, Some(&mut obs)).map_err(|e| anyhow::anyhow!("{e}"))?
    };
    let wall_s = start.elapsed().as_secs_f64();
    let certified = run.status == SolveStatus::Certified;
    Ok(TimedRun { run, wall_s, certified, trace })
}

#[derive(Debug, Clone)]
pub struct ConvergeTraceRow {
    pub mode: &'static str,
    pub iter: usize,
    pub elapsed_s: f64,
    pub objective_estimate: f64,
    pub gap: Option<f64>,
    pub exact_gap: bool,
}

pub struct ConvergeOutcome {
    pub rows: Vec<ConvergeTraceRow>,
    pub det_wall_s: f64,
    pub sub_wall_s: f64,
    pub det_objective: f64,
    pub sub_objective: f64,
    pub det_certified: bool,
    pub sub_certified: bool,
    pub eps: f64,
}

/// Deterministic-versus-subsampled convergence trace on the collaborative
/// filtering fixture. `eps` was calibrated once on the fixture family: the
/// exact-certificate plateau sits well below it, the subsampled plateau
/// just below it.
pub fn run_converge_trace(n: usize, seed: u64, eps: f64, max_iters: usize) -> Result<ConvergeOutcome> {
    let inst = collab_fixture(n, seed)?;
    let s1_sub = ((0.2 * n as f64).ceil() as usize).max(1);
    let det = timed_solve(&inst.problem, &inst.geometry, eps, n, n * n, seed ^ 1, max_iters, true)?;
    let sub =
        timed_solve(&inst.problem, &inst.geometry, eps, s1_sub, n * n, seed ^ 2, max_iters, true)?;
    let mut rows = Vec::new();
    for (mode, timed) in [("deterministic", &det), ("subsampled", &sub)] {
        for (r, t) in &timed.trace {
            rows.push(ConvergeTraceRow {
                mode,
                iter: r.iter,
                elapsed_s: *t,
                objective_estimate: r.objective_estimate,
                gap: r.gap,
                exact_gap: r.exact_gap,
            });
        }
    }
    Ok(ConvergeOutcome {
        rows,
        det_wall_s: det.wall_s,
        sub_wall_s: sub.wall_s,
        det_objective: det.run.final_gap.primal,
        sub_objective: sub.run.final_gap.primal,
        det_certified: det.certified,
        sub_certified: sub.certified,
        eps,
    })
}

#[derive(Debug, Clone)]
pub struct CpuTableRow {
    pub problem: &'static str,
    pub n: usize,
    pub trial: usize,
    pub t_det_s: f64,
    pub t_sub_s: f64,
    pub speedup: f64,
}

/// CPU-time table at desk scale: per-trial deterministic and subsampled
/// wall times for the spectral-box and collaborative-filtering problems.
pub fn run_cpu_table(
    problem: &str,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<CpuTableRow>> {
    let mut rows = Vec::new();
    for &n in sizes {
        for trial in 0..trials {
            let run_seed = seed + trial as u64;
            let (label, det, sub): (&'static str, TimedRun, TimedRun) = match problem {
                "spectral-box" => {
                    let inst = spectral_box_fixture(n, run_seed)?;
                    let eps = spectral_box_eps(n);
                    let s1 = ((0.2 * n as f64).ceil() as usize).max(1);
                    let det = timed_solve(
                        &inst.problem, &inst.geometry, eps, n, n * n, run_seed ^ 1, 100_000, false,
                    )?;
                    let sub = timed_solve(
                        &inst.problem, &inst.geometry, eps, s1, n * n, run_seed ^ 2, 100_000, false,
                    )?;
                    ("spectral-box", det, sub)
                }
                "collab-filter" => {
                    let inst = collab_fixture(n, run_seed)?;
                    let eps = collab_eps(n);
                    let s1 = ((0.2 * n as f64).ceil() as usize).max(1);
                    let det = timed_solve(
                        &inst.problem, &inst.geometry, eps, n, n * n, run_seed ^ 1, 60_000, false,
                    )?;
                    let sub = timed_solve(
                        &inst.problem, &inst.geometry, eps, s1, n * n, run_seed ^ 2, 60_000, false,
                    )?;
                    ("collab-filter", det, sub)
                }
                other => bail!("unknown cpu-table problem {other}"),
            };
            rows.push(CpuTableRow {
                problem: label,
                n,
                trial,
                t_det_s: det.wall_s,
                t_sub_s: sub.wall_s,
                speedup: det.wall_s / sub.wall_s,
            });
        }
    }
    Ok(rows)
}

/// Frozen precision targets for the benchmark fixtures (calibrated once so
/// both sampling modes certify).
pub fn spectral_box_eps(_n: usize) -> f64 {
    0.05
}

pub fn collab_eps(n: usize) -> f64 {
    // certificate plateaus grow slowly with n on the fixture family
    1.0 + 0.01 * n as f64
}
