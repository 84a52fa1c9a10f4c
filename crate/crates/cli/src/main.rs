//! specsub: subsampled spectral optimization workbench.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use specsub::experiments::{
    self, median_error_per_rate, run_converge_trace, run_cpu_table, run_eig_speedup,
    run_err_vs_rank, run_err_vs_s, ExperimentConfig,
};
use specsub::gen::{random_spectrum_matrix, SpectrumLaw, SpectrumSpec};
use specsub::meta::RunMetadata;
use specsub::{mtx, trace};
use specsub_core::problems::{build_fmmc, build_lasso, build_spectral_box, Graph};
use specsub_core::solver::{rate_search, solve, SolveStatus, SolverConfig};
use specsub_core::{Error as CoreError, RngStream};

#[derive(Parser)]
#[command(
    name = "specsub",
    about = "Spectral-norm and k-sum minimization by subsampled stochastic approximation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random symmetric matrix with a prescribed spectrum.
    Gen(GenArgs),
    /// Solve one problem instance at fixed sampling rates.
    Solve(SolveArgs),
    /// Solve by doubling the column sampling rate until the gap certifies.
    RateSearch(SolveArgs),
    /// Reproduce the paper-style experiments as CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Matrix dimension.
    #[arg(long)]
    n: usize,
    /// Spectrum law: beta:a:b | list:v1,v2,... | rank:r:noise
    #[arg(long, default_value = "beta:1:3")]
    law: String,
    /// Scale multiplying every eigenvalue.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output Matrix Market file.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Problem kind: spectral-box | collab-filter | lasso | fmmc
    #[arg(long)]
    problem: String,
    /// Symmetric input matrix (spectral-box), Matrix Market.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Box radius (spectral-box) or free-entry radius (collab-filter).
    #[arg(long)]
    rho: Option<f64>,
    /// Ratings CSV `i,j,value` with 0-based indices (collab-filter).
    #[arg(long)]
    ratings: Option<PathBuf>,
    /// Matrix dimension for collab-filter inputs.
    #[arg(long)]
    n: Option<usize>,
    /// Number of leading singular values in the objective (collab-filter).
    #[arg(long)]
    k: Option<usize>,
    /// Diagonal design values, one per line (lasso).
    #[arg(long)]
    design: Option<PathBuf>,
    /// Response values, one per line (lasso).
    #[arg(long)]
    response: Option<PathBuf>,
    /// Residual radius (lasso).
    #[arg(long)]
    sigma: Option<f64>,
    /// Graph edge list with header `n m`, 0-based vertices (fmmc).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Precision target; runs certify at gap <= 2 eps.
    #[arg(long)]
    eps: f64,
    /// Confidence parameter in (0, 1].
    #[arg(long, default_value_t = 0.25)]
    beta: f64,
    /// Column sampling rate (default: n, i.e. full sampling).
    #[arg(long)]
    s1: Option<usize>,
    /// Product sampling rate (default: n^2).
    #[arg(long)]
    s2: Option<usize>,
    /// Explicit iteration count (default: the theoretical budget).
    #[arg(long)]
    n_iters: Option<usize>,
    /// Hard cap on iterations.
    #[arg(long, default_value_t = 200_000)]
    max_iters: usize,
    /// Exact-gap cadence (default: planned / 50).
    #[arg(long)]
    gap_interval: Option<usize>,
    /// Thin non-checkpoint trace rows to every k-th iteration.
    #[arg(long, default_value_t = 1)]
    trace_every: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory for metadata, trace and solution artifacts.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// err-vs-rank | err-hist | err-vs-s | eig-speedup | converge-trace |
    /// cpu-table
    experiment: String,
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Problem sizes for cpu-table (comma separated).
    #[arg(long)]
    sizes: Option<String>,
    /// cpu-table problem: spectral-box | collab-filter
    #[arg(long, default_value = "spectral-box")]
    problem: String,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    /// Sampling ratios s/n (comma separated).
    #[arg(long)]
    ratios: Option<String>,
    /// Precision target for converge-trace (default: calibrated).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own message; usage problems exit 1
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args, false),
        Command::RateSearch(args) => cmd_solve(args, true),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let law = SpectrumLaw::parse(&args.law)?;
    let spec = SpectrumSpec { n: args.n, law, scale: args.scale };
    let mut rng = RngStream::new(args.seed);
    let g = random_spectrum_matrix(&spec, &mut rng)?;
    mtx::write_symmetric(&args.output, &g.matrix)?;
    let mut meta = RunMetadata::new("gen");
    meta.push("n", args.n);
    meta.push("law", &args.law);
    meta.push("scale", args.scale);
    meta.push("seed", args.seed);
    meta.push("spectral_norm", trace::fmt(g.spectral_norm()));
    meta.push("numerical_rank", trace::fmt(g.numerical_rank()));
    meta.push_digest("output_digest", &args.output)?;
    meta.write(&args.output.with_extension("meta.txt"))?;
    Ok(ExitCode::SUCCESS)
}

fn read_column(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("read {path:?}"))?;
    text.split_whitespace().map(|t| t.parse::<f64>().map_err(|e| anyhow!("{e}"))).collect()
}

fn read_ratings(path: &Path) -> Result<Vec<(usize, usize, f64)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("read {path:?}"))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        // tolerate a header line
        if lineno == 0 && line.chars().any(|c| c.is_alphabetic()) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(|t| t.trim()).collect();
        if fields.len() != 3 {
            bail!("ratings line {} needs i,j,value", lineno + 1);
        }
        out.push((fields[0].parse()?, fields[1].parse()?, fields[2].parse()?));
    }
    Ok(out)
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("read {path:?}"))?;
    let mut numbers = text.split_whitespace().map(|t| t.parse::<usize>());
    let n = numbers.next().ok_or_else(|| anyhow!("missing vertex count"))??;
    let m = numbers.next().ok_or_else(|| anyhow!("missing edge count"))??;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let i = numbers.next().ok_or_else(|| anyhow!("truncated edge list"))??;
        let j = numbers.next().ok_or_else(|| anyhow!("truncated edge list"))??;
        edges.push((i, j));
    }
    Graph::new(n, edges).map_err(|e| anyhow!("{e}"))
}

fn cmd_solve(args: SolveArgs, search: bool) -> Result<ExitCode> {
    std::fs::create_dir_all(&args.output)
        .with_context(|| format!("create {:?}", args.output))?;
    let mut meta = RunMetadata::new(if search { "rate-search" } else { "solve" });
    meta.push("problem", &args.problem);
    meta.push("eps", args.eps);
    meta.push("beta", args.beta);
    meta.push("seed", args.seed);

    let (problem, geometry, fmmc): (
        specsub_core::problem::AffineSpectralProblem,
        specsub_core::geometry::ProxGeometry,
        Option<specsub_core::problems::FmmcInstance>,
    ) = match args.problem.as_str() {
        "spectral-box" => {
            let input = args.input.as_ref().ok_or_else(|| anyhow!("--input required"))?;
            let rho = args.rho.ok_or_else(|| anyhow!("--rho required"))?;
            meta.push_digest("input_digest", input)?;
            meta.push("rho", rho);
            let a = mtx::read(input)?.into_sym()?;
            let inst = build_spectral_box(&a, rho).map_err(|e| anyhow!("{e}"))?;
            (inst.problem, inst.geometry, None)
        }
        "collab-filter" => {
            let ratings_path =
                args.ratings.as_ref().ok_or_else(|| anyhow!("--ratings required"))?;
            let n = args.n.ok_or_else(|| anyhow!("--n required"))?;
            let k = args.k.unwrap_or(4);
            let rho = args.rho.ok_or_else(|| anyhow!("--rho (free-entry radius) required"))?;
            meta.push_digest("ratings_digest", ratings_path)?;
            meta.push("n", n);
            meta.push("k", k);
            meta.push("rho", rho);
            let ratings = read_ratings(ratings_path)?;
            let inst = specsub_core::problems::build_collab_filter(n, &ratings, k, rho, false)
                .map_err(|e| anyhow!("{e}"))?;
            meta.push("rating_center", trace::fmt(inst.center));
            (inst.problem, inst.geometry, None)
        }
        "lasso" => {
            let design = read_column(
                args.design.as_ref().ok_or_else(|| anyhow!("--design required"))?,
            )?;
            let response = read_column(
                args.response.as_ref().ok_or_else(|| anyhow!("--response required"))?,
            )?;
            let sigma = args.sigma.ok_or_else(|| anyhow!("--sigma required"))?;
            meta.push("sigma", sigma);
            let inst = build_lasso(&design, &response, sigma).map_err(|e| anyhow!("{e}"))?;
            (inst.problem, inst.geometry, None)
        }
        "fmmc" => {
            let graph_path = args.graph.as_ref().ok_or_else(|| anyhow!("--graph required"))?;
            meta.push_digest("graph_digest", graph_path)?;
            let graph = read_graph(graph_path)?;
            let inst = build_fmmc(&graph).map_err(|e| anyhow!("{e}"))?;
            (inst.problem.clone(), inst.geometry.clone(), Some(inst))
        }
        other => bail!("unknown problem {other}"),
    };

    let n = problem.n();
    let mut config = SolverConfig::new(
        args.eps,
        args.beta,
        args.s1.unwrap_or(n),
        args.s2.unwrap_or(n * n),
        args.seed,
    );
    config.n_iters = args.n_iters;
    config.max_iters = args.max_iters;
    config.gap_check_interval = args.gap_interval;
    meta.push("s1", config.s1);
    meta.push("s2", config.s2);
    meta.push("max_iters", config.max_iters);

    let trace_path = args.output.join("trace.csv");
    let mut tracer = trace::TraceWriter::create(&trace_path, args.trace_every)?;
    let started = std::time::Instant::now();

    let (run, s1_final, runs_used) = if search {
        let outcome = match rate_search(&problem, &geometry, &config) {
            Ok(o) => o,
            Err(CoreError::CapReached { best_gap }) => {
                meta.push("status", "cap-reached");
                meta.push("best_gap", trace::fmt(best_gap));
                meta.push("elapsed_s", format!("{:.3}", started.elapsed().as_secs_f64()));
                meta.write(&args.output.join("metadata.txt"))?;
                tracer.finish()?;
                eprintln!("rate search hit the column cap (best gap {best_gap:.3e})");
                return Ok(ExitCode::from(2));
            }
            Err(e) => bail!("{e}"),
        };
        let mut stages = trace::CsvTable::create(&args.output.join("stages.csv"), "s1,gap")?;
        for (s1, gap) in &outcome.stage_gaps {
            stages.row(&[s1.to_string(), trace::fmt(*gap)])?;
        }
        stages.finish()?;
        meta.push("total_sampled_columns", outcome.total_sampled_columns);
        meta.push("final_stage_sampled_columns", outcome.final_stage_sampled_columns);
        (outcome.run, outcome.s1_final, outcome.runs)
    } else {
        let mut obs = |r: &specsub_core::solver::TraceRecord, _y: &[f64]| {
            tracer.record(r);
        };
        let run =
            solve(&problem, &geometry, &config, Some(&mut obs)).map_err(|e| anyhow!("{e}"))?;
        let s1 = config.s1;
        (run, s1, 1)
    };
    tracer.finish()?;

    mtx::write_vector(&args.output.join("solution.mtx"), &run.solution)?;
    if let Some(inst) = &fmmc {
        let p = inst.transition_matrix(&run.solution);
        mtx::write_symmetric(&args.output.join("transition.mtx"), &p)?;
    }

    meta.push("iterations", run.iterations);
    meta.push("planned_iters", run.planned_iters);
    meta.push("gamma", trace::fmt(run.gamma));
    meta.push("s1_final", s1_final);
    meta.push("runs", runs_used);
    meta.push("objective", trace::fmt(run.final_gap.primal));
    meta.push("gap", trace::fmt(run.final_gap.gap));
    meta.push("matvecs", run.counters.matvecs);
    meta.push("sampled_columns", run.counters.sampled_columns);
    meta.push("sampled_products", run.counters.sampled_products);
    meta.push("dense_passes", run.counters.dense_passes);
    meta.push(
        "status",
        match run.status {
            SolveStatus::Certified => "certified",
            SolveStatus::BudgetExhausted => "budget-exhausted",
        },
    );
    meta.push("elapsed_s", format!("{:.3}", started.elapsed().as_secs_f64()));
    meta.write(&args.output.join("metadata.txt"))?;

    println!(
        "{}: objective {:.6e}, gap {:.6e} ({} iterations, s1 = {})",
        args.problem, run.final_gap.primal, run.final_gap.gap, run.iterations, s1_final
    );
    if run.status != SolveStatus::Certified {
        eprintln!("gap above 2 eps: budget exhausted before certification");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| t.trim().parse::<T>().map_err(|e| anyhow!("bad list entry {t}: {e}")))
        .collect()
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let mut cfg = ExperimentConfig::new(args.n, args.trials, args.seed)?;
    if let Some(r) = &args.ratios {
        cfg.ratios = parse_list(r)?;
    }
    let mut meta = RunMetadata::new("bench");
    meta.push("experiment", &args.experiment);
    meta.push("n", cfg.n);
    meta.push("trials", cfg.trials);
    meta.push("seed", cfg.seed);

    match args.experiment.as_str() {
        "err-vs-rank" | "err-hist" => {
            let rows = run_err_vs_rank(&cfg)?;
            if args.experiment == "err-vs-rank" {
                let mut t = trace::CsvTable::create(
                    &args.output,
                    "matrix_id,law,numrank,rel_error",
                )?;
                for r in &rows {
                    t.row(&[
                        r.matrix_id.to_string(),
                        r.law.clone(),
                        trace::fmt(r.numrank),
                        trace::fmt(r.rel_error),
                    ])?;
                }
                t.finish()?;
                let pts: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|r| (2.0..=50.0).contains(&r.numrank))
                    .map(|r| (r.numrank, r.rel_error))
                    .collect();
                let slope = experiments::fit_loglog_slope(&pts);
                meta.push("loglog_slope_numrank_2_50", trace::fmt(slope));
                println!("err-vs-rank: {} matrices, loglog slope {slope:.3}", rows.len());
            } else {
                let mut t = trace::CsvTable::create(
                    &args.output,
                    "matrix_id,numrank,rel_error,bound_ratio",
                )?;
                for r in &rows {
                    t.row(&[
                        r.matrix_id.to_string(),
                        trace::fmt(r.numrank),
                        trace::fmt(r.rel_error),
                        trace::fmt(r.bound_ratio),
                    ])?;
                }
                t.finish()?;
                let below = rows.iter().filter(|r| r.bound_ratio < 1.0).count();
                println!("err-hist: {}/{} ratios below the theoretical bound", below, rows.len());
            }
        }
        "err-vs-s" => {
            let rows = run_err_vs_s(&cfg)?;
            let mut t = trace::CsvTable::create(&args.output, "s,trial,rel_error")?;
            for r in &rows {
                t.row(&[r.s.to_string(), r.trial.to_string(), trace::fmt(r.rel_error)])?;
            }
            t.finish()?;
            let medians = median_error_per_rate(&rows);
            let slope = experiments::fit_loglog_slope(&medians);
            meta.push("loglog_slope_vs_s", trace::fmt(slope));
            println!("err-vs-s: loglog slope {slope:.3}");
        }
        "eig-speedup" => {
            let rows = run_eig_speedup(&cfg)?;
            let mut t = trace::CsvTable::create(
                &args.output,
                "ratio,trial,t_exact_s,t_sketch_s,speedup,exact_product_cost,sketch_product_cost",
            )?;
            for r in &rows {
                t.row(&[
                    r.ratio.to_string(),
                    r.trial.to_string(),
                    format!("{:.6}", r.t_exact_s),
                    format!("{:.6}", r.t_sketch_s),
                    format!("{:.4}", r.speedup),
                    r.exact_product_cost.to_string(),
                    r.sketch_product_cost.to_string(),
                ])?;
            }
            t.finish()?;
        }
        "converge-trace" => {
            let eps = args.eps.unwrap_or_else(|| experiments::collab_eps(cfg.n));
            let out = run_converge_trace(cfg.n, cfg.seed, eps, 60_000)?;
            let mut t = trace::CsvTable::create(
                &args.output,
                "mode,iter,elapsed_s,obj_estimate,gap,exact_gap_flag",
            )?;
            for r in &out.rows {
                t.row(&[
                    r.mode.to_string(),
                    r.iter.to_string(),
                    format!("{:.6}", r.elapsed_s),
                    trace::fmt(r.objective_estimate),
                    r.gap.map(trace::fmt).unwrap_or_default(),
                    u8::from(r.exact_gap).to_string(),
                ])?;
            }
            t.finish()?;
            meta.push("eps", eps);
            meta.push("det_wall_s", format!("{:.3}", out.det_wall_s));
            meta.push("sub_wall_s", format!("{:.3}", out.sub_wall_s));
            meta.push("det_objective", trace::fmt(out.det_objective));
            meta.push("sub_objective", trace::fmt(out.sub_objective));
            println!(
                "converge-trace: deterministic {:.2}s, subsampled {:.2}s (certified: {}/{})",
                out.det_wall_s, out.sub_wall_s, out.det_certified, out.sub_certified
            );
        }
        "cpu-table" => {
            let sizes: Vec<usize> = match &args.sizes {
                Some(s) => parse_list(s)?,
                None => vec![200, 500, 1000],
            };
            let rows = run_cpu_table(&args.problem, &sizes, cfg.trials, cfg.seed)?;
            let mut t =
                trace::CsvTable::create(&args.output, "problem,n,trial,t_det_s,t_sub_s,speedup")?;
            for r in &rows {
                t.row(&[
                    r.problem.to_string(),
                    r.n.to_string(),
                    r.trial.to_string(),
                    format!("{:.6}", r.t_det_s),
                    format!("{:.6}", r.t_sub_s),
                    format!("{:.4}", r.speedup),
                ])?;
            }
            t.finish()?;
            for &n in &sizes {
                let mut ts: Vec<f64> =
                    rows.iter().filter(|r| r.n == n).map(|r| r.speedup).collect();
                let med = experiments::median(&mut ts);
                println!("cpu-table {} n={n}: median speedup {med:.2}", args.problem);
            }
        }
        other => bail!("unknown experiment {other}"),
    }

    meta.write(&args.output.with_extension("meta.txt"))?;
    Ok(ExitCode::SUCCESS)
}
