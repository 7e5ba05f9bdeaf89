//! `poqa` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::circuits::AnsatzConfig;
use crate::encoding::{build_portfolio_qubo, exact_ground_state, qubo_to_ising, GroundState};
use crate::error::{Error, Result};
use crate::market::{generate_synthetic, load_prices, statistics_of, PriceSeries, SyntheticParams};
use crate::report::{emit_report, render, Format, ReportFile, RunManifest};
use crate::solvers::{qaoa_solve, vqe_solve, InitMode, Method, OptimizerOptions, SolveResult};
use crate::sweep::{default_risks, run_sweep, Algorithm, SweepGrid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "poqa",
    version,
    about = "Portfolio selection as an Ising ground state: exact, VQE and QAOA"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Price data utilities.
    Data {
        #[command(subcommand)]
        command: DataCommand,
    },
    /// Solve one problem with one algorithm.
    Solve(SolveArgs),
    /// Run the risk × configuration × algorithm grid.
    Sweep(SweepArgs),
    /// Re-render a saved JSON report.
    Report(ReportArgs),
}

#[derive(Debug, Subcommand)]
enum DataCommand {
    /// Write a seeded synthetic price series as CSV.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 8)]
    assets: usize,
    #[arg(long, default_value_t = 126)]
    days: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Per-day expected return.
    #[arg(long, default_value_t = SyntheticParams::default().drift)]
    drift: f64,
    /// Per-day volatility.
    #[arg(long, default_value_t = SyntheticParams::default().vol)]
    vol: f64,
    #[arg(long)]
    out: PathBuf,
}

/// Problem inputs shared by `solve` and `sweep`.
#[derive(Debug, Args)]
struct ProblemArgs {
    /// Price CSV (`date,TICKER,...`). Without it the seed-42 synthetic series is used.
    #[arg(long)]
    prices: Option<PathBuf>,
    /// Keep only the first N assets.
    #[arg(long)]
    assets: Option<usize>,
    /// Number of assets to select; defaults to half the assets.
    #[arg(long)]
    budget: Option<usize>,
    /// Constraint penalty weight; defaults to a risk-dependent bound.
    #[arg(long)]
    penalty: Option<f64>,
}

#[derive(Debug, Args)]
struct OptimizerArgs {
    /// Objective evaluations per start.
    #[arg(long, default_value_t = OptimizerOptions::default().max_evals)]
    max_evals: usize,
    /// Independent starts per run; the best is kept.
    #[arg(long, default_value_t = OptimizerOptions::default().starts)]
    starts: usize,
    #[arg(long, default_value_t = OptimizerOptions::default().f_tol)]
    f_tol: f64,
    /// Nelder–Mead reruns from the incumbent after convergence.
    #[arg(long, default_value_t = 0)]
    restarts: usize,
    /// nelder-mead or spsa.
    #[arg(long, default_value = "nelder-mead", value_parser = parse_method)]
    method: Method,
    /// Optimize against sampled expectations with this many shots.
    #[arg(long)]
    shots: Option<usize>,
}

impl OptimizerArgs {
    fn options(&self, seed: u64) -> OptimizerOptions {
        OptimizerOptions {
            method: self.method,
            max_evals: self.max_evals,
            f_tol: self.f_tol,
            seed,
            starts: self.starts,
            init: InitMode::Random,
            shots: self.shots,
            restarts: self.restarts,
            ..OptimizerOptions::default()
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    /// Configuration label B–M (QAOA uses only its repetition count).
    #[arg(long, value_parser = parse_config)]
    config: AnsatzConfig,
    #[arg(long)]
    risk: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    /// Print every start's energy to stderr.
    #[arg(long)]
    verbose: bool,
    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Comma-separated risk factors.
    #[arg(long, value_delimiter = ',', alias = "risk")]
    risks: Option<Vec<f64>>,
    /// Comma-separated configuration labels.
    #[arg(long, value_delimiter = ',', value_parser = parse_config)]
    configs: Option<Vec<AnsatzConfig>>,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm)]
    algos: Option<Vec<Algorithm>>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    /// Re-run the manifest of an earlier report; grid flags are ignored.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "POQA_THREADS")]
    threads: Option<usize>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, json, svg or table; inferred from --out, json otherwise.
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// JSON report written by `sweep`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = parse_format)]
    format: Format,
    /// Restrict to the 0.1/0.5/0.9 risk levels.
    #[arg(long)]
    motivational: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_config(s: &str) -> std::result::Result<AnsatzConfig, String> {
    AnsatzConfig::from_label(s).map_err(|_| format!("unknown config label {s:?} (expected B–M)"))
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::UnknownConfig(_) | Error::InvalidArgument(_)) {
                EXIT_USAGE
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Data {
            command: DataCommand::Gen(args),
        } => data_gen(&args),
        Command::Solve(args) => solve(&args),
        Command::Sweep(args) => sweep(&args),
        Command::Report(args) => report(&args),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) if p.as_os_str() != "-" => fs::write(p, text).map_err(|e| Error::io(p, e)),
        _ => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn data_gen(args: &GenArgs) -> Result<()> {
    let params = SyntheticParams {
        n_assets: args.assets,
        n_days: args.days,
        seed: args.seed,
        drift: args.drift,
        vol: args.vol,
        ..SyntheticParams::default()
    };
    generate_synthetic(&params)?.save(&args.out)
}

struct Inputs {
    series: PriceSeries,
    synthetic: Option<SyntheticParams>,
}

fn load_inputs(prices: Option<&Path>, synthetic: Option<SyntheticParams>, assets: Option<usize>) -> Result<Inputs> {
    let (series, synthetic) = match prices {
        Some(p) => (load_prices(p, None)?, None),
        None => {
            let params = synthetic.unwrap_or_default();
            (generate_synthetic(&params)?, Some(params))
        }
    };
    let series = match assets {
        Some(k) => series.take_assets(k)?,
        None => series,
    };
    Ok(Inputs { series, synthetic })
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    algorithm: Algorithm,
    config: String,
    risk: f64,
    budget: usize,
    penalty_lambda: f64,
    tickers: &'a [String],
    result: SolveResult,
    feasible: bool,
    exact: GroundState,
    matched: bool,
}

fn solve(args: &SolveArgs) -> Result<()> {
    let inputs = load_inputs(args.problem.prices.as_deref(), None, args.problem.assets)?;
    let stats = statistics_of(&inputs.series)?;
    let budget = args.problem.budget.unwrap_or(stats.n() / 2);
    let (problem, qubo) = build_portfolio_qubo(&stats, args.risk, budget, args.problem.penalty)?;
    let exact = exact_ground_state(&qubo)?;
    let opts = args.optimizer.options(args.seed);
    let result = match args.algo {
        Algorithm::Vqe => vqe_solve(&qubo, &args.config, &opts)?,
        Algorithm::Qaoa => qaoa_solve(&qubo_to_ising(&qubo), args.config.reps, &opts)?,
    };
    if args.verbose {
        for (k, e) in result.start_energies.iter().enumerate() {
            eprintln!("start {k}: energy {e:e}");
        }
    }
    let out = SolveOutput {
        algorithm: args.algo,
        config: args.config.label_str(),
        risk: args.risk,
        budget,
        penalty_lambda: problem.penalty_lambda,
        tickers: inputs.series.tickers(),
        feasible: problem.is_feasible(&result.bits),
        matched: result.bits == exact.bits,
        result,
        exact,
    };
    let mut text = serde_json::to_string_pretty(&out)?;
    text.push('\n');
    write_output(args.out.as_deref(), &text)
}

fn manifest_from_args(args: &SweepArgs, inputs: &Inputs, budget: usize) -> RunManifest {
    RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: RunManifest::now(),
        prices: args.problem.prices.clone(),
        synthetic: inputs.synthetic,
        assets: args.problem.assets,
        tickers: inputs.series.tickers().to_vec(),
        budget,
        penalty: args.problem.penalty,
        risks: args.risks.clone().unwrap_or_else(default_risks),
        configs: args
            .configs
            .clone()
            .unwrap_or_else(AnsatzConfig::all_labelled)
            .iter()
            .map(AnsatzConfig::label_str)
            .collect(),
        algorithms: args
            .algos
            .clone()
            .unwrap_or_else(|| vec![Algorithm::Vqe, Algorithm::Qaoa]),
        base_seed: args.seed,
        optimizer: args.optimizer.options(args.seed),
    }
}

fn load_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match ReportFile::from_json(&text) {
        Ok(file) => Ok(file.manifest),
        Err(_) => Ok(serde_json::from_str(&text)?),
    }
}

/// Runs the sweep a manifest describes.
pub fn run_manifest(manifest: &RunManifest, threads: Option<usize>) -> Result<ReportFile> {
    let inputs = load_inputs(manifest.prices.as_deref(), manifest.synthetic, manifest.assets)?;
    let stats = statistics_of(&inputs.series)?;
    let grid = SweepGrid {
        risks: manifest.risks.clone(),
        configs: manifest.config_list()?,
        algorithms: manifest.algorithms.clone(),
        stats,
        budget: manifest.budget,
        penalty: manifest.penalty,
        base_seed: manifest.base_seed,
        optimizer: manifest.optimizer,
        threads,
    };
    Ok(ReportFile {
        manifest: manifest.clone(),
        report: run_sweep(&grid)?,
    })
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let manifest = match &args.manifest {
        Some(path) => {
            let mut m = load_manifest(path)?;
            m.timestamp = RunManifest::now();
            m
        }
        None => {
            let inputs = load_inputs(args.problem.prices.as_deref(), None, args.problem.assets)?;
            let budget = args.problem.budget.unwrap_or(inputs.series.n_assets() / 2);
            manifest_from_args(args, &inputs, budget)
        }
    };
    let file = run_manifest(&manifest, args.threads)?;
    let format = args
        .format
        .or_else(|| {
            args.out
                .as_ref()
                .and_then(|p| p.extension())
                .and_then(|e| e.to_str())
                .and_then(|e| e.parse().ok())
        })
        .unwrap_or(Format::Json);
    match &args.out {
        Some(p) if p.as_os_str() != "-" => emit_report(&file, format, p),
        _ => write_output(None, &render(&file, format)?),
    }
}

fn report(args: &ReportArgs) -> Result<()> {
    let mut file = ReportFile::load(&args.input)?;
    if args.motivational {
        file.report = crate::sweep::motivational_subset(&file.report)?;
    }
    match &args.out {
        Some(p) if p.as_os_str() != "-" => emit_report(&file, args.format, p),
        _ => write_output(None, &render(&file, args.format)?),
    }
}
