//! Benchmark driver for the Armijo line-search strategies in `armijo-core`.
//!
//! `parse_cli` turns an argument vector into a list of [`ExperimentSpec`]s,
//! `run_experiments` solves each one and `emit` writes the resulting
//! [`ComparisonRow`]s as CSV or JSON.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use armijo_core::checks::{self, CheckReport};
use armijo_core::solver;
use armijo_core::{
    generate, DirectionKind, Euclidean, LineSearchKind, LineSearchParams, ProblemKind,
    SolverConfig, Sphere, Stiefel,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Column order of the CSV output.
pub const CSV_HEADER: [&str; 16] = [
    "spec_id",
    "method",
    "problem",
    "n",
    "p",
    "seed",
    "status",
    "iterations",
    "f_final",
    "grad_norm_final",
    "ambient_f_evals",
    "retraction_evals",
    "retracted_f_evals",
    "gradient_evals",
    "hessian_builds",
    "wall_time_s",
];

/// Status recorded when the solver returned an error instead of a trace.
pub const ERROR_STATUS: &str = "error";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),

    #[error("invalid configuration: {0}")]
    Config(#[from] armijo_core::Error),

    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON output failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(e) if !e.use_stderr() => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LineSearchArg {
    Standard,
    Modified,
}

impl From<LineSearchArg> for LineSearchKind {
    fn from(arg: LineSearchArg) -> Self {
        match arg {
            LineSearchArg::Standard => LineSearchKind::Standard,
            LineSearchArg::Modified => LineSearchKind::Modified,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Newton,
    Steepest,
}

impl From<DirectionArg> for DirectionKind {
    fn from(arg: DirectionArg) -> Self {
        match arg {
            DirectionArg::Newton => DirectionKind::Newton,
            DirectionArg::Steepest => DirectionKind::Steepest,
        }
    }
}

fn open_unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in the open interval (0, 1)"))
    }
}

fn positive_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} is not a positive finite number"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "armijo-bench",
    version,
    about = "Compare Armijo line-search strategies on manifold problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Debug, Subcommand)]
enum Commands {
    /// Solve each instance with a single line-search strategy
    Run {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value = "modified")]
        linesearch: LineSearchArg,
    },
    /// Solve each instance with both strategies from the same starting point
    Compare {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the built-in verification suites and report pass/fail
    Check,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Problem family; a comma-separated list runs several
    #[arg(long, value_delimiter = ',', default_value = "rayleigh_sphere")]
    problem: Vec<ProblemKind>,
    /// Ambient dimension (rows for Stiefel)
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Stiefel column count; ignored by vector problems
    #[arg(long, default_value_t = 3)]
    p: usize,
    /// Instance seed; a comma-separated list runs several
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seed: Vec<u64>,
    /// Backtracking contraction factor
    #[arg(long, default_value_t = 0.5, value_parser = open_unit_interval)]
    beta: f64,
    /// Sufficient-decrease constant
    #[arg(long, default_value_t = 0.1, value_parser = open_unit_interval)]
    tau: f64,
    /// Gradient-norm stopping tolerance
    #[arg(long, default_value_t = 1e-8, value_parser = positive_real)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Lower eigenvalue clamp of the Newton operator
    #[arg(long, default_value_t = 1e-3, value_parser = positive_real)]
    nu: f64,
    /// Upper eigenvalue clamp of the Newton operator
    #[arg(long, default_value_t = 1e6, value_parser = positive_real)]
    rho: f64,
    #[arg(long, value_enum, default_value = "newton")]
    direction: DirectionArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

/// One solver run: an instance plus a full solver configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Instance identifier, shared by the paired runs of `compare`.
    pub id: String,
    pub problem: ProblemKind,
    pub n: usize,
    /// Column count; 1 for the vector problems.
    pub p: usize,
    pub seed: u64,
    pub config: SolverConfig,
}

impl ExperimentSpec {
    pub fn new(problem: ProblemKind, n: usize, p: usize, seed: u64, config: SolverConfig) -> Self {
        let p = if problem.uses_columns() { p } else { 1 };
        Self {
            id: format!("{problem}-n{n}-p{p}-s{seed}"),
            problem,
            n,
            p,
            seed,
            config,
        }
    }

    /// `"<direction>_<linesearch>"`, e.g. `newton_modified`.
    pub fn method(&self) -> String {
        format!(
            "{}_{}",
            self.config.direction.label(),
            self.config.line_search.label()
        )
    }
}

/// What the command line asked for.
#[derive(Debug, Clone, PartialEq)]
pub enum Invocation {
    Experiments {
        specs: Vec<ExperimentSpec>,
        format: Format,
        out: Option<PathBuf>,
    },
    Check,
}

fn validate_dims(problem: ProblemKind, n: usize, p: usize) -> armijo_core::Result<()> {
    match problem {
        ProblemKind::RayleighSphere => Sphere::new(n).map(drop),
        ProblemKind::BrockettStiefel => Stiefel::new(n, p).map(drop),
        ProblemKind::QuadraticEuclidean => Euclidean::new(n).map(drop),
    }
}

fn build_specs(
    common: &CommonArgs,
    strategies: &[LineSearchKind],
) -> Result<Vec<ExperimentSpec>, CliError> {
    let params = LineSearchParams::new(common.beta, common.tau, LineSearchParams::DEFAULT_ELL_MAX)?;
    let mut specs = Vec::new();
    for &problem in &common.problem {
        validate_dims(problem, common.n, common.p)?;
        for &seed in &common.seed {
            for &line_search in strategies {
                let config = SolverConfig {
                    tol_grad: common.tol,
                    max_iter: common.max_iter,
                    nu: common.nu,
                    rho: common.rho,
                    line_search,
                    params,
                    direction: common.direction.into(),
                    ..SolverConfig::default()
                };
                config.validate()?;
                specs.push(ExperimentSpec::new(
                    problem, common.n, common.p, seed, config,
                ));
            }
        }
    }
    Ok(specs)
}

/// Parses `argv` (including the program name). Help and version requests
/// come back as [`CliError::Usage`] with exit code 0.
pub fn parse_cli<I, T>(argv: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    match cli.command {
        Commands::Run { common, linesearch } => Ok(Invocation::Experiments {
            specs: build_specs(&common, &[linesearch.into()])?,
            format: common.format,
            out: common.out,
        }),
        Commands::Compare { common } => Ok(Invocation::Experiments {
            specs: build_specs(
                &common,
                &[LineSearchKind::Standard, LineSearchKind::Modified],
            )?,
            format: common.format,
            out: common.out,
        }),
        Commands::Check => Ok(Invocation::Check),
    }
}

/// Outcome of one experiment. Counters are the run's final cumulative
/// totals; `f_final` and `grad_norm_final` are empty for error rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub spec_id: String,
    pub method: String,
    pub problem: String,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub status: String,
    pub iterations: usize,
    pub f_final: Option<f64>,
    pub grad_norm_final: Option<f64>,
    pub ambient_f_evals: u64,
    pub retraction_evals: u64,
    pub retracted_f_evals: u64,
    pub gradient_evals: u64,
    pub hessian_builds: u64,
    pub wall_time_s: f64,
}

impl ComparisonRow {
    pub fn converged(&self) -> bool {
        self.status == armijo_core::Status::Converged.label()
    }
}

fn run_one(spec: &ExperimentSpec) -> ComparisonRow {
    let start = Instant::now();
    let result = generate(spec.problem, spec.n, spec.p, spec.seed)
        .and_then(|prob| solver::run(&prob.objective, prob.manifold(), &prob.x0, &spec.config));
    let wall_time_s = start.elapsed().as_secs_f64();
    let mut row = ComparisonRow {
        spec_id: spec.id.clone(),
        method: spec.method(),
        problem: spec.problem.label().to_string(),
        n: spec.n,
        p: spec.p,
        seed: spec.seed,
        status: ERROR_STATUS.to_string(),
        iterations: 0,
        f_final: None,
        grad_norm_final: None,
        ambient_f_evals: 0,
        retraction_evals: 0,
        retracted_f_evals: 0,
        gradient_evals: 0,
        hessian_builds: 0,
        wall_time_s,
    };
    if let Ok(trace) = result {
        let c = trace.counters();
        row.status = trace.status.label().to_string();
        row.iterations = trace.iterations();
        row.f_final = Some(trace.f_final());
        row.grad_norm_final = Some(trace.grad_norm_final());
        row.ambient_f_evals = c.ambient_f_evals;
        row.retraction_evals = c.retraction_evals;
        row.retracted_f_evals = c.retracted_f_evals;
        row.gradient_evals = c.gradient_evals;
        row.hessian_builds = c.hessian_builds;
    }
    row
}

/// Runs every spec in order. Failures become rows; the batch never aborts.
pub fn run_experiments(specs: &[ExperimentSpec]) -> Vec<ComparisonRow> {
    specs.iter().map(run_one).collect()
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_record(row: &ComparisonRow) -> [String; 16] {
    let opt = |x: Option<f64>| x.map(format_real).unwrap_or_default();
    [
        row.spec_id.clone(),
        row.method.clone(),
        row.problem.clone(),
        row.n.to_string(),
        row.p.to_string(),
        row.seed.to_string(),
        row.status.clone(),
        row.iterations.to_string(),
        opt(row.f_final),
        opt(row.grad_norm_final),
        row.ambient_f_evals.to_string(),
        row.retraction_evals.to_string(),
        row.retracted_f_evals.to_string(),
        row.gradient_evals.to_string(),
        row.hessian_builds.to_string(),
        format_real(row.wall_time_s),
    ]
}

/// Writes `rows` to `writer`. CSV always includes the header line.
pub fn write_rows<W: Write>(
    rows: &[ComparisonRow],
    format: Format,
    writer: W,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(CSV_HEADER)?;
            for row in rows {
                w.write_record(csv_record(row))?;
            }
            w.flush().map_err(|source| CliError::Io {
                path: "<csv>".into(),
                source,
            })?;
        }
        Format::Json => {
            let mut writer = writer;
            serde_json::to_writer_pretty(&mut writer, rows)?;
            writeln!(writer).map_err(|source| CliError::Io {
                path: "<json>".into(),
                source,
            })?;
        }
    }
    Ok(())
}

/// Writes `rows` to the file at `destination`, or to standard output.
pub fn emit(
    rows: &[ComparisonRow],
    format: Format,
    destination: Option<&Path>,
) -> Result<(), CliError> {
    match destination {
        Some(path) => {
            let io_err = |source| CliError::Io {
                path: path.display().to_string(),
                source,
            };
            let file = File::create(path).map_err(io_err)?;
            let mut writer = BufWriter::new(file);
            write_rows(rows, format, &mut writer)?;
            writer.flush().map_err(io_err)
        }
        None => write_rows(rows, format, io::stdout().lock()),
    }
}

/// Exit status for a finished batch: 0 if every run converged, 2 otherwise.
pub fn batch_exit_code(rows: &[ComparisonRow]) -> i32 {
    if rows.iter().all(ComparisonRow::converged) {
        0
    } else {
        2
    }
}

/// Runs the verification suites, printing one line per check as it finishes.
pub fn run_checks<W: Write>(mut out: W) -> io::Result<Vec<CheckReport>> {
    let suites: [fn() -> CheckReport; 8] = [
        checks::retraction_axioms,
        checks::gradient_consistency,
        checks::ambient_gap_decay,
        checks::small_step_acceptance,
        checks::euclidean_equivalence,
        checks::newton_convergence,
        checks::retraction_savings,
        checks::counter_exactness,
    ];
    let mut reports = Vec::with_capacity(suites.len());
    for suite in suites {
        let report = suite();
        writeln!(out, "{report}")?;
        out.flush()?;
        reports.push(report);
    }
    Ok(reports)
}

/// Full program behaviour behind `main`; returns the exit status.
pub fn execute<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = parse_cli(argv).and_then(|invocation| match invocation {
        Invocation::Experiments { specs, format, out } => {
            let rows = run_experiments(&specs);
            emit(&rows, format, out.as_deref())?;
            Ok(batch_exit_code(&rows))
        }
        Invocation::Check => {
            let reports = run_checks(io::stdout().lock()).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?;
            Ok(if reports.iter().all(|r| r.passed && r.within_budget()) {
                0
            } else {
                2
            })
        }
    });
    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            CliError::Usage(e).exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
