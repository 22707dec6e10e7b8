//! Command-line front end.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 numeric-domain error,
//! 4 Monte Carlo disagreement alarm (`|z| > 4`).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::ModelConfig;
use crate::dist::{counting_pmf, counting_pmf_table, CompoundClaimDistribution};
use crate::dividend::{barrier_value, certify_optimality, find_b_star, write_value_table, OptimalityCertificate};
use crate::error::Error;
use crate::scale::{build_scale_grid, ScaleFunctionGrid};
use crate::shape::{self, ShapeVerdict};
use crate::sim::{simulate_dividends, simulate_dividends_traced, write_traces, SimulationResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_ALARM: i32 = 4;

/// `|z|` above which `simulate` reports disagreement.
pub const Z_ALARM: f64 = 4.0;

/// Environment variable fixing the worker-thread count.
pub const THREADS_ENV: &str = "DIVBAR_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "divbar",
    version,
    about = "Optimal dividend barriers for risk processes with bulk claims"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the scale function and its derivatives as CSV.
    Scale(GridArgs),
    /// Locate b*, certify it, and write a JSON report and value table.
    Optimize(GridArgs),
    /// Monte Carlo check of the barrier value against the analytic formula.
    Simulate(SimulateArgs),
    /// Report shape properties of the configured distributions as JSON.
    CheckShapes(CommonArgs),
    /// Tabulate the pmf of the claim-counting process as CSV.
    Pmf(PmfArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Model configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid intervals (overrides `control.n`).
    #[arg(long, value_name = "N")]
    grid_n: Option<usize>,
    /// Grid upper end (overrides `control.x_max`).
    #[arg(long, value_name = "X")]
    xmax: Option<f64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Barrier level; defaults to b*.
    #[arg(long, value_name = "B")]
    barrier: Option<f64>,
    /// Seed (overrides `simulate.seed`).
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Also write CSV traces of the first 10 paths.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PmfArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Time at which to evaluate P(N_t = n).
    #[arg(long, value_name = "T", default_value_t = 1.0)]
    time: f64,
    /// Largest n tabulated.
    #[arg(long, value_name = "N", default_value_t = 20)]
    n_max: usize,
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config { .. } => EXIT_CONFIG,
            _ => EXIT_NUMERIC,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<i32, Failure>;

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message);
        return f.code;
    }
    let outcome = match &cli.command {
        Command::Scale(a) => cmd_scale(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::CheckShapes(a) => cmd_check_shapes(a),
        Command::Pmf(a) => cmd_pmf(a),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // a pool may already exist when run() is called twice in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn load(path: &Path) -> std::result::Result<ModelConfig, Failure> {
    Ok(ModelConfig::from_path(path)?)
}

fn open_out(path: Option<&Path>) -> std::result::Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::config(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_failure(e: io::Error) -> Failure {
    Failure {
        code: EXIT_NUMERIC,
        message: format!("write failed: {e}"),
    }
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> std::result::Result<(), Failure> {
    let mut out = open_out(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| write_failure(e.into()))?;
    writeln!(out).map_err(write_failure)?;
    out.flush().map_err(write_failure)
}

fn grid_for(cfg: &ModelConfig, a: &GridArgs) -> std::result::Result<ScaleFunctionGrid, Failure> {
    let model = cfg.risk_model()?;
    let opts = cfg.scale_options(a.grid_n, a.xmax);
    let grid = build_scale_grid(&model, cfg.control.q, &opts)?;
    if grid.is_flagged() {
        for flag in grid.flags() {
            eprintln!("warning: {flag}");
        }
    }
    Ok(grid)
}

fn cmd_scale(a: &GridArgs) -> CliResult {
    let cfg = load(&a.common.config)?;
    let grid = grid_for(&cfg, a)?;
    let mut out = open_out(a.common.out.as_deref())?;
    grid.write_csv(&mut out).map_err(write_failure)?;
    out.flush().map_err(write_failure)?;
    // the table is valid either way; a boundary minimum still means the
    // grid is too short for the barrier problem
    find_b_star(&grid)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OptimizeReport<'a> {
    b_star: f64,
    w1_min: f64,
    q: f64,
    rho: f64,
    x_max: f64,
    grid_n: usize,
    method: crate::scale::ScaleMethod,
    grid_flags: &'a [String],
    certificate: &'a OptimalityCertificate,
    value_table: Option<String>,
}

/// `<stem>.values.csv` next to the report.
fn value_table_path(report: &Path) -> PathBuf {
    let stem = report.file_stem().map(|s| s.to_os_string()).unwrap_or_default();
    let mut name = stem;
    name.push(".values.csv");
    report.with_file_name(name)
}

fn cmd_optimize(a: &GridArgs) -> CliResult {
    let cfg = load(&a.common.config)?;
    let model = cfg.risk_model()?;
    let grid = grid_for(&cfg, a)?;
    let cert = certify_optimality(&model, &grid)?;
    let table = a.common.out.as_deref().map(value_table_path);
    if let Some(p) = &table {
        let f = File::create(p).map_err(|e| Failure::config(format!("cannot write {}: {e}", p.display())))?;
        let mut w = BufWriter::new(f);
        write_value_table(&grid, cert.b_star, grid.xs(), &mut w)?;
        w.flush().map_err(write_failure)?;
    }
    let report = OptimizeReport {
        b_star: cert.b_star,
        w1_min: cert.w1_min,
        q: grid.q(),
        rho: grid.rho(),
        x_max: grid.x_max(),
        grid_n: grid.n(),
        method: grid.method(),
        grid_flags: grid.flags(),
        certificate: &cert,
        value_table: table.map(|p| p.display().to_string()),
    };
    write_json(&report, a.common.out.as_deref())?;
    // keep standard output parseable when the report goes there
    if a.common.out.is_some() {
        println!("{}", cert.summary());
    } else {
        eprintln!("{}", cert.summary());
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SimulateReport {
    seed: u64,
    dt: f64,
    b_is_optimal: bool,
    /// `V_b(x)` from the scale function; absent when `b` lies beyond the grid.
    analytic: Option<f64>,
    z: Option<f64>,
    #[serde(flatten)]
    result: SimulationResult,
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult {
    let cfg = load(&a.grid.common.config)?;
    let Some(section) = cfg.simulate else {
        return Err(Failure::config(
            "configuration error at `simulate`: section required by the simulate command",
        ));
    };
    let sim_cfg = cfg.simulation_config(&section, a.seed)?;
    let model = cfg.risk_model()?;
    let grid = grid_for(&cfg, &a.grid)?;
    let (b, b_is_optimal) = match a.barrier {
        Some(b) if b >= 0.0 && !b.is_nan() => (b, false),
        Some(b) => return Err(Failure::config(format!("--barrier must be >= 0, got {b}"))),
        None => (find_b_star(&grid)?.0, true),
    };
    let x = section.x.unwrap_or(b.min(grid.x_max()));
    let analytic = if b <= grid.x_max() && x <= grid.x_max() {
        Some(barrier_value(&grid, b, x)?)
    } else {
        None
    };
    let result = match &a.trace {
        Some(path) => {
            let (r, traces) = simulate_dividends_traced(&model, b, x, &sim_cfg, 10)?;
            let mut out = open_out(Some(path))?;
            write_traces(&traces, &mut out).map_err(write_failure)?;
            out.flush().map_err(write_failure)?;
            r
        }
        None => simulate_dividends(&model, b, x, &sim_cfg)?,
    };
    let z = analytic.map(|v| {
        if result.std_error > 0.0 {
            (result.estimate - v) / result.std_error
        } else if (result.estimate - v).abs() <= 1e-12 * v.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY.copysign(result.estimate - v)
        }
    });
    let report = SimulateReport {
        seed: sim_cfg.seed,
        dt: sim_cfg.dt,
        b_is_optimal,
        analytic,
        // JSON has no infinities
        z: z.filter(|z| z.is_finite()),
        result,
    };
    write_json(&report, a.grid.common.out.as_deref())?;
    match z {
        Some(z) if !(z.abs() <= Z_ALARM) => {
            eprintln!("alarm: Monte Carlo estimate disagrees with the analytic value (z = {z:.3})");
            Ok(EXIT_ALARM)
        }
        _ => Ok(EXIT_OK),
    }
}

#[derive(Serialize)]
struct ShapeReport {
    compounder: Vec<ShapeVerdict>,
    claims: Vec<ShapeVerdict>,
    compound: Vec<ShapeVerdict>,
}

fn cmd_check_shapes(a: &CommonArgs) -> CliResult {
    let cfg = load(&a.config)?;
    let model = cfg.risk_model()?;
    let (compounder, claim) = (model.compounder(), model.claim());
    let compound = CompoundClaimDistribution::new(compounder.clone(), claim.clone())?;
    let report = ShapeReport {
        compounder: vec![
            shape::compounder_discrete_cm(compounder),
            shape::compounder_log_convex(compounder, false),
            shape::compounder_log_convex(compounder, true),
            shape::compounder_dfr(compounder),
        ],
        claims: vec![
            shape::check_density_cm(claim)?,
            shape::check_log_convex_density(claim)?,
            shape::check_dfr(claim)?,
        ],
        compound: vec![
            shape::check_compound_log_convex_density(&compound)?,
            shape::check_dfr(&compound)?,
        ],
    };
    write_json(&report, a.out.as_deref())?;
    Ok(EXIT_OK)
}

fn cmd_pmf(a: &PmfArgs) -> CliResult {
    let cfg = load(&a.common.config)?;
    let model = cfg.risk_model()?;
    if !(a.time > 0.0 && a.time.is_finite()) {
        return Err(Failure::config(format!("--time must be > 0, got {}", a.time)));
    }
    let series = counting_pmf_table(model.compounder(), model.lambda(), a.time, a.n_max);
    let mut out = open_out(a.common.out.as_deref())?;
    writeln!(out, "n,p,p_series").map_err(write_failure)?;
    for (n, ps) in series.iter().enumerate() {
        let p = counting_pmf(model.compounder(), model.lambda(), a.time, n)?;
        writeln!(out, "{n},{p:.16e},{ps:.16e}").map_err(write_failure)?;
    }
    out.flush().map_err(write_failure)?;
    Ok(EXIT_OK)
}
