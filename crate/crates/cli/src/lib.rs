//! `mnpi` command-line interface.
//!
//! ```text
//! mnpi generate --K 10 --n 46 --phi 3.19 --pi 0.224,0.466,0.273,0.031,0.004 --seed 7 --out hcd.csv
//! mnpi predict  --data hcd.csv --m 46 --future obs.csv --methods all --out intervals.json
//! mnpi simulate --config sim.toml --out report.csv
//! ```
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | usage error (bad flags, unknown method id) |
//! | 3 | input file could not be parsed |
//! | 4 | input rejected by validation (design, dispersion, zero category, ...) |
//! | 5 | numerical failure (calibration bracket, MCMC initialisation, too many failed iterations, ...) |
//! | 6 | file I/O error |
//! | 7 | invalid configuration file |
//!
//! Errors are written to stderr as one JSON object
//! `{"error": <kind>, "message": <text>, "exit_code": <code>}`.
//!
//! `MNPI_THREADS` sets the worker thread count (default: all cores).

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mnpi::bayes::McmcSettings;
use mnpi::bootstrap::CalibrationSettings;
use mnpi::dm::{generate_dataset_with, sample_dm_vector, Dispersion};
use mnpi::io::{self, OutputFormat};
use mnpi::methods::{compute_intervals, Method, MethodSettings, PriorKind};
use mnpi::sim::{probability_vector, run_simulation, tail_balance};
use mnpi::{Error, FutureSpec, HistoricalDataset, RngStream};
use serde::Serialize;

pub mod config;

pub const THREADS_ENV: &str = "MNPI_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;
pub const EXIT_MODEL: i32 = 5;
pub const EXIT_IO: i32 = 6;
pub const EXIT_CONFIG: i32 = 7;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(e) => match e {
                Error::UnknownMethod { .. } => EXIT_USAGE,
                Error::Parse(_) => EXIT_PARSE,
                Error::Validation(_)
                | Error::DegenerateDesign(_)
                | Error::ZeroCategory { .. }
                | Error::ZeroProbability { .. }
                | Error::InvalidDispersion { .. }
                | Error::Domain(_) => EXIT_VALIDATION,
                Error::NotPsd(_)
                | Error::Bracket { .. }
                | Error::DegenerateRank(_)
                | Error::Initialization(_)
                | Error::Simulation(_) => EXIT_MODEL,
                Error::Io(_) => EXIT_IO,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Config(_) => "Config",
            CliError::Core(e) => e.kind(),
        }
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

#[derive(Parser, Debug)]
#[command(name = "mnpi", version, about = "Simultaneous prediction intervals for overdispersed multinomial counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute prediction intervals for a future study from historical counts.
    Predict(PredictArgs),
    /// Run a coverage simulation described by a TOML file.
    Simulate(SimulateArgs),
    /// Generate a synthetic historical dataset (and optionally a future study).
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// Historical counts, `study,<cat_1>,...,<cat_C>`.
    #[arg(long)]
    data: PathBuf,
    /// Size of the future study.
    #[arg(long)]
    m: u64,
    /// Observed future counts (one row, same header) to check for containment.
    #[arg(long)]
    future: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Comma-separated method ids, or `all`.
    #[arg(long, default_value = "all")]
    methods: String,
    /// Bootstrap replicates.
    #[arg(long = "B", default_value_t = 10_000)]
    b: usize,
    /// Prior for `bayes-*` ids without a prior suffix.
    #[arg(long, default_value = "cauchy")]
    prior: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    chains: usize,
    /// Retained MCMC iterations per chain.
    #[arg(long, default_value_t = 2_500)]
    iters: usize,
    #[arg(long, default_value_t = 1_000)]
    warmup: usize,
    #[arg(long, default_value_t = 100_000)]
    mvn_draws: usize,
    /// Bisection tolerance in coverage units (must be at least 1/B).
    #[arg(long, default_value_t = 0.0025)]
    tolerance: f64,
    /// Interval file (one row per method and category).
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` or `json`; defaults to the extension of `--out`.
    #[arg(long)]
    format: Option<String>,
    /// Category-by-method `[L, U]` table as CSV.
    #[arg(long)]
    table_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// One row per scenario, method and category.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    format: Option<String>,
    /// Per-bound tail probabilities with the `1 - alpha/(2C)` reference.
    #[arg(long)]
    tail_out: Option<PathBuf>,
    /// 1000 iterations, B = 10000, S = 10000 unless the config overrides them.
    #[arg(long)]
    full_scale: bool,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long = "K")]
    k: usize,
    /// Cluster size of every historical study.
    #[arg(long)]
    n: u64,
    /// Future study size (default: n).
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    phi: f64,
    /// Comma-separated probabilities; rescaled to sum to 1.
    #[arg(long, conflicts_with = "vector", required_unless_present = "vector")]
    pi: Option<String>,
    /// Tabulated probability vector id, e.g. `C5-07`.
    #[arg(long)]
    vector: Option<String>,
    /// Comma-separated category labels.
    #[arg(long)]
    labels: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also draw one future study of size m and write it here.
    #[arg(long)]
    future_out: Option<PathBuf>,
    /// Keep all-zero categories instead of adding one count to a random study.
    #[arg(long)]
    no_repair: bool,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code. Normal output goes to `out`, errors to `err`.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            return report(err, &CliError::Usage(e.to_string().trim_end().to_string()));
        }
    };
    // buffered so the command can run inside a dedicated thread pool
    let mut obuf: Vec<u8> = Vec::new();
    let mut ebuf: Vec<u8> = Vec::new();
    let result = match threads_from_env() {
        Ok(Some(n)) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, &mut obuf, &mut ebuf)),
            Err(e) => Err(CliError::Usage(format!("cannot build thread pool: {e}"))),
        },
        Ok(None) => dispatch(cli.command, &mut obuf, &mut ebuf),
        Err(e) => Err(e),
    };
    let _ = out.write_all(&obuf);
    let _ = err.write_all(&ebuf);
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => report(err, &e),
    }
}

pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        _ => Ok(None),
    }
}

fn report(err: &mut dyn Write, e: &CliError) -> i32 {
    let code = e.exit_code();
    let r = ErrorReport {
        error: e.kind(),
        message: e.to_string(),
        exit_code: code,
    };
    let _ = writeln!(err, "{}", serde_json::to_string(&r).expect("error serializes"));
    code
}

fn dispatch(cmd: Command, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<(), CliError> {
    match cmd {
        Command::Predict(a) => predict(a, out, err),
        Command::Simulate(a) => simulate(a, out, err),
        Command::Generate(a) => generate(a, out),
    }
}

fn out_io(e: std::io::Error) -> CliError {
    CliError::Core(Error::Io(e.to_string()))
}

fn resolve_format(explicit: Option<&str>, path: Option<&Path>) -> Result<OutputFormat, CliError> {
    match explicit {
        Some(f) => f.parse().map_err(|e: Error| CliError::Usage(e.to_string())),
        None => Ok(path.map_or(OutputFormat::Csv, OutputFormat::from_path)),
    }
}

fn predict(a: PredictArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let methods = Method::parse_list(&a.methods)?;
    let prior: PriorKind = a.prior.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
    let format = resolve_format(a.format.as_deref(), a.out.as_deref())?;
    let data = io::parse_counts_csv(&a.data)?;
    let future = match &a.future {
        Some(p) => Some(io::parse_future_csv(p, Some(data.category_labels()))?),
        None => None,
    };
    if let Some(y) = &future {
        let total: u64 = y.iter().sum();
        if total != a.m {
            return Err(Error::Validation(format!("future counts sum to {total}, but --m is {}", a.m)).into());
        }
    }
    let spec = FutureSpec::new(a.m, a.alpha)?;
    let settings = MethodSettings {
        replicates: a.b,
        calibration: CalibrationSettings {
            tolerance: a.tolerance,
            ..Default::default()
        },
        mvn_draws: a.mvn_draws,
        mcmc: McmcSettings {
            chains: a.chains,
            sampling_iters: a.iters,
            warmup: a.warmup,
        },
        default_prior: prior,
    };
    let res = compute_intervals(&data, &spec, &methods, &settings, &RngStream::new(a.seed))?;
    let labels = data.category_labels();

    writeln!(
        out,
        "K = {}, C = {}, m = {}, pi_hat = [{}], phi_hat = {} (raw {})",
        data.clusters(),
        data.categories(),
        a.m,
        res.fit.pi_hat.iter().map(|p| io::format_sig(*p)).collect::<Vec<_>>().join(", "),
        io::format_sig(res.fit.phi_hat),
        io::format_sig(res.fit.phi_raw),
    )
    .map_err(out_io)?;
    let table = io::interval_table(&res.intervals, labels, future.as_deref());
    write!(out, "{}", io::render_table(&table)).map_err(out_io)?;
    for set in &res.intervals {
        for d in &set.diagnostics {
            let _ = writeln!(err, "warning: {}: {d}", set.method);
        }
    }
    let verdicts = future.as_ref().map(|y| io::containment(&res.intervals, labels, y));
    if let Some(v) = &verdicts {
        for c in v {
            if c.contained {
                writeln!(out, "{}: contained", c.method).map_err(out_io)?;
            } else {
                writeln!(out, "{}: not contained ({})", c.method, c.violations.join(", ")).map_err(out_io)?;
            }
        }
    }
    if let Some(path) = &a.out {
        let rows = io::interval_rows(&res.intervals, labels);
        io::emit_intervals(&rows, verdicts.as_deref(), format, path)?;
    }
    if let Some(path) = &a.table_out {
        io::write_text(path, &io::interval_table_csv(&table)?)?;
    }
    Ok(())
}

fn simulate(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let format = resolve_format(a.format.as_deref(), Some(&a.out))?;
    let text = std::fs::read_to_string(&a.config)
        .map_err(|e| CliError::Core(Error::Io(format!("{}: {e}", a.config.display()))))?;
    let scenarios = config::scenarios_from_toml(&text, a.full_scale)?;
    let mut rows = Vec::new();
    let mut tails = Vec::new();
    for s in &scenarios {
        let start = Instant::now();
        let report = run_simulation(s)?;
        let _ = writeln!(
            err,
            "{}: {} iterations ({} failed) in {:.1}s",
            s.id,
            report.successes + report.failures,
            report.failures,
            start.elapsed().as_secs_f64()
        );
        for m in &report.methods {
            writeln!(
                out,
                "{}  {:<22} coverage {}  mc_error {}",
                s.id,
                m.method,
                io::format_sig(m.coverage),
                io::format_sig(m.mc_error)
            )
            .map_err(out_io)?;
        }
        rows.extend(io::simulation_rows(&report));
        tails.extend(tail_balance(&report));
    }
    io::emit_simulation(&rows, format, &a.out)?;
    if let Some(p) = &a.tail_out {
        io::write_text(p, &io::tail_balance_to_csv(&tails)?)?;
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid {what} value '{}'", t.trim())))
        })
        .collect()
}

fn generate(a: GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let raw: Vec<f64> = match (&a.pi, &a.vector) {
        (Some(p), _) => parse_list(p, "--pi")?,
        (None, Some(id)) => probability_vector(id)
            .ok_or_else(|| CliError::Usage(format!("unknown probability vector id '{id}'")))?
            .pi,
        (None, None) => return Err(CliError::Usage("one of --pi or --vector is required".into())),
    };
    let total: f64 = raw.iter().sum();
    if raw.iter().any(|p| !(*p >= 0.0)) || !(total > 0.0) {
        return Err(Error::Validation("--pi must be non-negative with a positive sum".into()).into());
    }
    let pi: Vec<f64> = raw.iter().map(|p| p / total).collect();
    let labels: Vec<String> = match &a.labels {
        Some(l) => l.split(',').map(|s| s.trim().to_string()).collect(),
        None => (1..=pi.len()).map(|i| format!("cat{i}")).collect(),
    };
    if labels.len() != pi.len() {
        return Err(Error::Validation(format!("{} labels for {} categories", labels.len(), pi.len())).into());
    }
    let m = a.m.unwrap_or(a.n);
    let mut rng = RngStream::new(a.seed).rng();
    let sizes = vec![a.n; a.k];
    let hist = generate_dataset_with(&sizes, &pi, Dispersion::Fixed(a.phi), &mut rng, !a.no_repair)?;
    let studies: Vec<String> = (1..=a.k).map(|i| format!("study{i}")).collect();
    let hist = HistoricalDataset::with_labels(hist.counts().to_vec(), labels.clone(), studies)?;
    io::write_text(&a.out, &io::dataset_to_csv(&hist)?)?;
    writeln!(out, "wrote {} studies x {} categories to {}", a.k, pi.len(), a.out.display()).map_err(out_io)?;
    if let Some(p) = &a.future_out {
        let y = sample_dm_vector(m, &pi, a.phi, &mut rng)?;
        io::write_text(p, &io::future_to_csv(&labels, "current", &y)?)?;
        writeln!(out, "wrote future study (m = {m}) to {}", p.display()).map_err(out_io)?;
    }
    Ok(())
}
