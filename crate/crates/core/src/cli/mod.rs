//! Command implementations behind the `adapoly` binary.
//!
//! Data goes to stdout (or `--output`), diagnostics to stderr. Exit codes:
//! 0 when the solve converged, 2 when it stopped at `max_iter`, 1 on any
//! input or configuration error.

mod report;

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::filter::{build_filter, initial_degree, SpectrumBounds, SpmvCounter};
use crate::rng::{gaussian_matrix, generator, Stream};
use crate::solver::{estimate_eigcount, estimate_spectrum_bounds_counted, solve, SolverConfig};
use crate::sparse::{
    csr_to_tiled, maspmm, naive_spmm, read_matrix_market, CsrMatrix, SegmentedDense,
    DEFAULT_TILE_COLS, DEFAULT_TILE_ROWS,
};

pub use report::{MatrixInfo, ResultSummary, RunReport};

#[derive(Debug, Parser)]
#[command(name = "adapoly", version, about = "Interior eigenvalues of sparse symmetric matrices")]
pub struct Cli {
    /// Worker threads for the parallel kernels (0 = all cores).
    #[arg(long, global = true, env = "ADAPOLY_THREADS")]
    pub threads: Option<usize>,

    /// Increase log verbosity on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute all eigenpairs in an interval and write a JSON report.
    Solve(SolveArgs),
    /// Sample a filter and its error bound as CSV.
    InspectFilter(InspectArgs),
    /// Compare the tiled and the row-wise SpMM kernels as CSV.
    BenchSpmm(BenchArgs),
    /// Estimate the number of eigenvalues in an interval as JSON.
    EstimateCount(CountArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Matrix Market file.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Target interval `a:b`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub interval: Option<(f64, f64)>,
    /// File of `key = value` solver settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Convergence tolerance relative to the norm estimate
    #[arg(long = "tau-c")]
    pub tau_c: Option<f64>,
    /// Ratio threshold for the adaptive degree choice
    #[arg(long = "tau-a")]
    pub tau_a: Option<f64>,
    /// Damping exponent.
    #[arg(long)]
    pub m: Option<f64>,
    /// Initial degree constant.
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// Maximum degree as a multiple of the initial degree
    #[arg(long = "k-mult")]
    pub k_mult: Option<f64>,
    /// Subspace oversampling factor
    #[arg(long)]
    pub mu: Option<f64>,
    /// Iteration limit
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixed subspace dimension (skips the count estimate).
    #[arg(long = "subspace")]
    pub subspace: Option<usize>,
    /// Rows per tile of the SpMM kernel.
    #[arg(long)]
    pub ti: Option<usize>,
    /// Columns per block of the SpMM kernel.
    #[arg(long)]
    pub tk: Option<usize>,
    /// Report destination (default stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write eigenvectors as a text table, one vector per column.
    #[arg(long)]
    pub eigenvectors: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// Filter interval `a:b`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub interval: (f64, f64),
    /// Spectrum bounds `lo:hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-1:1")]
    pub bounds: (f64, f64),
    /// Maximum degree the damping is computed for.
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    /// Truncation degree (default: k).
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub m: f64,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Sample range `lo:hi` (default: the spectrum bounds).
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub x_range: Option<(f64, f64)>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Block widths, comma separated.
    #[arg(long = "k", value_delimiter = ',', default_value = "8,32,128")]
    pub widths: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_TILE_ROWS)]
    pub ti: usize,
    #[arg(long, default_value_t = DEFAULT_TILE_COLS)]
    pub tk: usize,
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub interval: (f64, f64),
    #[arg(long, default_value_t = 30)]
    pub probes: usize,
    /// Filter degree (default: the solver's maximum degree for this interval).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub m: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "lanczos-steps", default_value_t = 40)]
    pub lanczos_steps: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `a:b` into an ordered pair.
pub fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `a:b`, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("invalid number {a:?}"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("invalid number {b:?}"))?;
    if !(a < b) {
        return Err(format!("range requires a < b, got {a}:{b}"));
    }
    Ok((a, b))
}

/// Reads a `key = value` settings file. `#` starts a comment.
pub fn load_config_file(path: &Path, config: &mut SolverConfig) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value` in {}", path.display()),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key == "interval" {
            let (a, b) = parse_range(value).map_err(Error::Config)?;
            config.interval_a = a;
            config.interval_b = b;
        } else {
            config.set(key, value)?;
        }
    }
    Ok(())
}

fn load_matrix(path: &Path) -> Result<CsrMatrix> {
    read_matrix_market(path).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{message} (in {})", path.display()),
        },
        other => other,
    })
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Builds the solver configuration: defaults, then the settings file, then flags.
pub fn solve_config(args: &SolveArgs) -> Result<SolverConfig> {
    let mut config = SolverConfig::default();
    let mut have_interval = false;
    if let Some(path) = &args.config {
        let before = (config.interval_a, config.interval_b);
        load_config_file(path, &mut config)?;
        have_interval = before != (config.interval_a, config.interval_b);
    }
    if let Some((a, b)) = args.interval {
        config.interval_a = a;
        config.interval_b = b;
        have_interval = true;
    }
    if !have_interval {
        return Err(Error::config("no interval given (use --interval a:b)"));
    }
    let overrides = [
        (args.tau_c, &mut config.tau_c),
        (args.tau_a, &mut config.tau_a),
        (args.m, &mut config.m),
        (args.c, &mut config.c),
        (args.k_mult, &mut config.k_multiplier),
        (args.mu, &mut config.mu),
    ];
    for (flag, slot) in overrides {
        if let Some(v) = flag {
            *slot = v;
        }
    }
    if let Some(v) = args.max_iter {
        config.max_iter = v;
    }
    if let Some(v) = args.seed {
        config.rng_seed = v;
    }
    if args.subspace.is_some() {
        config.p_override = args.subspace;
    }
    if args.ti.is_some() {
        config.tile_ti = args.ti;
    }
    if args.tk.is_some() {
        config.tile_tk = args.tk;
    }
    config.validate()?;
    Ok(config)
}

/// Eigenvectors as text: one row per vector entry, one column per vector,
/// 17 significant digits.
pub fn format_eigenvectors(v: &DenseMatrix) -> String {
    let mut s = String::with_capacity(v.n_rows() * v.n_cols() * 25);
    for r in 0..v.n_rows() {
        for (c, x) in v.row(r).iter().enumerate() {
            if c > 0 {
                s.push(' ');
            }
            write!(s, "{x:.16e}").expect("writing to a String cannot fail");
        }
        s.push('\n');
    }
    s
}

fn cmd_solve(args: &SolveArgs, threads: usize) -> Result<ExitCode> {
    let config = solve_config(args)?;
    let a = load_matrix(&args.matrix)?;
    let result = solve(&a, &config)?;
    if let Some(path) = &args.eigenvectors {
        emit(Some(path), &format_eigenvectors(&result.eigenvectors))?;
    }
    let info = MatrixInfo {
        path: args.matrix.display().to_string(),
        n: a.n_rows(),
        nnz: a.nnz(),
    };
    let report = RunReport::new(config, info, threads, &result);
    emit(args.output.as_deref(), &to_json(&report))?;
    if result.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        log::warn!("stopped without converging ({:?})", result.termination);
        Ok(ExitCode::from(2))
    }
}

/// CSV rows `x,rho,error,bound` sampling the filter uniformly over `x_range`.
pub fn inspect_filter_csv(args: &InspectArgs) -> Result<String> {
    let bounds = SpectrumBounds::new(args.bounds.0, args.bounds.1)?;
    let f = build_filter(args.interval.0, args.interval.1, bounds, args.k, args.m)?;
    let degree = args.degree.unwrap_or(args.k);
    if degree < 1 || degree > args.k {
        return Err(Error::config(format!("degree must lie in [1, {}], got {degree}", args.k)));
    }
    let (lo, hi) = args.x_range.unwrap_or(args.bounds);
    if lo < bounds.lambda_min || hi > bounds.lambda_max {
        return Err(Error::config("sample range must lie inside the spectrum bounds"));
    }
    let xs: Vec<f64> = match args.samples {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        s => (0..s).map(|i| lo + (hi - lo) * i as f64 / (s - 1) as f64).collect(),
    };
    let rho = f.eval_scalar(&xs, degree)?;
    let mut out = String::from("x,rho,error,bound\n");
    for (x, r) in xs.iter().zip(&rho) {
        let bound = f.damped_bound(f.theta_of(*x), degree)?;
        let err = (f.step(*x) - r).abs();
        writeln!(out, "{x:.17e},{r:.17e},{err:.17e},{bound:.17e}").expect("String write");
    }
    Ok(out)
}

fn relative_error(x: &DenseMatrix, reference: &DenseMatrix) -> f64 {
    let diff = x.sub(reference).expect("same shape").frobenius_norm();
    let scale = reference.frobenius_norm();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// CSV rows `kernel,ti,tk,k,gflops,max_rel_err_vs_naive`.
pub fn bench_spmm_csv(a: &CsrMatrix, args: &BenchArgs) -> Result<String> {
    if args.widths.iter().any(|&k| k == 0) {
        return Err(Error::config("block widths must be at least 1"));
    }
    let reps = args.repetitions.max(1);
    let tiled = csr_to_tiled(a, args.ti, args.tk)?;
    let mut rng = generator(args.seed, Stream::Bench);
    let mut out = String::from("kernel,ti,tk,k,gflops,max_rel_err_vs_naive\n");
    for &k in &args.widths {
        let b = gaussian_matrix(&mut rng, a.n_cols(), k);
        let flops = 2.0 * a.nnz() as f64 * k as f64;

        let mut reference = DenseMatrix::zeros(0, 0);
        let t = Instant::now();
        for _ in 0..reps {
            reference = naive_spmm(a, &b)?;
        }
        let naive_time = t.elapsed().as_secs_f64() / reps as f64;

        let bs = SegmentedDense::from_dense(&b, args.tk)?;
        let mut c = SegmentedDense::zeros(a.n_rows(), k, args.tk)?;
        let mut worst = 0.0f64;
        let t = Instant::now();
        for _ in 0..reps {
            c.as_mut_slice().fill(0.0);
            maspmm(&tiled, &bs, &mut c)?;
        }
        let tiled_time = t.elapsed().as_secs_f64() / reps as f64;
        worst = worst.max(relative_error(&c.to_dense(), &reference));

        let gflops = |secs: f64| if secs > 0.0 { flops / secs / 1e9 } else { 0.0 };
        writeln!(out, "naive,,,{k},{:.4},0", gflops(naive_time)).expect("String write");
        writeln!(out, "maspmm,{},{},{k},{:.4},{worst:.3e}", args.ti, args.tk, gflops(tiled_time))
            .expect("String write");
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct CountReport {
    e_tilde: f64,
    ceil: i64,
    probes: usize,
    k: usize,
    m: f64,
    seed: u64,
    spmv_cost: u64,
    lanczos_spmv: u64,
    spectrum_bounds: SpectrumBounds,
    filter_interval: [f64; 2],
}

fn cmd_estimate_count(args: &CountArgs) -> Result<ExitCode> {
    let a = load_matrix(&args.matrix)?;
    let mut lanczos = SpmvCounter::new();
    let bounds = estimate_spectrum_bounds_counted(&a, args.lanczos_steps, args.seed, &mut lanczos)?;
    let (ia, ib) = args.interval;
    if ib <= bounds.lambda_min || ia >= bounds.lambda_max {
        return Err(Error::config(format!(
            "interval [{ia}, {ib}] lies outside the estimated spectrum [{}, {}]",
            bounds.lambda_min, bounds.lambda_max
        )));
    }
    let (fa, fb) = (ia.max(bounds.lambda_min), ib.min(bounds.lambda_max));
    let k = match args.k {
        Some(k) => k,
        None => {
            let defaults = SolverConfig::default();
            let alpha = bounds.map(fa).clamp(-1.0, 1.0).acos();
            let beta = bounds.map(fb).clamp(-1.0, 1.0).acos();
            let k1 = initial_degree(alpha, beta, defaults.c)?;
            (defaults.k_multiplier * k1 as f64).ceil() as usize
        }
    };
    let f = build_filter(fa, fb, bounds, k, args.m)?;
    let tiled = csr_to_tiled(&a, DEFAULT_TILE_ROWS, DEFAULT_TILE_COLS)?;
    let mut counter = SpmvCounter::new();
    let e = estimate_eigcount(&tiled, &f, args.probes, args.seed, &mut counter)?;
    let report = CountReport {
        e_tilde: e,
        ceil: e.ceil() as i64,
        probes: args.probes,
        k,
        m: args.m,
        seed: args.seed,
        spmv_cost: counter.get(),
        lanczos_spmv: lanczos.get(),
        spectrum_bounds: bounds,
        filter_interval: [fa, fb],
    };
    emit(args.output.as_deref(), &to_json(&report))?;
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: &Cli, threads: usize) -> Result<ExitCode> {
    match &cli.command {
        Command::Solve(args) => cmd_solve(args, threads),
        Command::InspectFilter(args) => {
            emit(args.output.as_deref(), &inspect_filter_csv(args)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::BenchSpmm(args) => {
            let a = load_matrix(&args.matrix)?;
            emit(args.output.as_deref(), &bench_spmm_csv(&a, args)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::EstimateCount(args) => cmd_estimate_count(args),
    }
}

/// Runs the parsed command inside a thread pool of the requested size.
pub fn run(cli: Cli) -> ExitCode {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    };
    let threads = pool.current_num_threads();
    match pool.install(|| dispatch(&cli, threads)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
