//! Command-line front end: `solve`, `simulate`, `sweep`, `validate`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rismac::harness::{self, Axis, SweepSpec, ValidateOptions};
use rismac::simulator::worker_threads;
use rismac::solver::{self, FixedPointOptions, ThroughputProblem};
use rismac::{Error, NetworkConfig, PairRule, PolicyKind, ThresholdTable};

#[derive(Parser)]
#[command(
    name = "rismac",
    version,
    about = "RIS-assisted CSMA/CA optimal-stopping solver and simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (key = value with units); defaults to the built-in reference scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve lambda* and the per-pair thresholds.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Run one policy and print a CSV row.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Threshold table from `solve` (needed by the proposed policy).
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value = "proposed")]
        policy: String,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Re-solve and simulate along one axis, printing CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `pt` (values in dBm) or `tau_d` (values in ms).
        #[arg(long)]
        axis: String,
        /// Comma-separated, strictly increasing.
        #[arg(long)]
        values: String,
        /// Comma-separated policy names; all four when omitted.
        #[arg(long)]
        policy: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Fail when a proposed-policy row strays from its solved value.
        #[arg(long)]
        strict: bool,
    },
    /// Cross-check solver, thresholds and simulator.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Failure with its exit code.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.exit_code() as u8, e.to_string())
    }
}

fn load_config(path: Option<&Path>) -> Result<NetworkConfig, Error> {
    match path {
        Some(p) => NetworkConfig::load(p),
        None => Ok(NetworkConfig::reference_scenario()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn solve(common: &Common) -> Result<(), Failure> {
    let cfg = load_config(common.config.as_deref())?;
    let problem = ThroughputProblem::new(&cfg)?;
    let (table, sol) = solver::build_threshold_table_with(&cfg, &FixedPointOptions::default())?;
    let residual = problem.residual(table.lambda_star)?;
    eprintln!("config {}", table.config_fingerprint);
    eprintln!(
        "lambda* = {:.10} bit/s/Hz ({} iterations, step {:.4}, residual {residual:.2e})",
        table.lambda_star, sol.iterations, sol.step
    );
    eprintln!("probing pairs: {}/{}", table.probing_set().len(), table.pairs());
    for (k, rule) in table.rules.iter().enumerate() {
        match rule {
            PairRule::Probe { zeta, eta } => eprintln!("  pair {:>2}: zeta {zeta:.6e}  eta {eta:.6e}", k + 1),
            PairRule::DirectOnly => eprintln!("  pair {:>2}: direct only", k + 1),
        }
    }
    emit(common.out.as_deref(), &table.to_text())?;
    Ok(())
}

fn load_table(path: Option<&Path>) -> Result<Option<ThresholdTable>, Error> {
    path.map(ThresholdTable::load).transpose()
}

fn csv_text(rows: &[harness::ResultRow]) -> Result<String, Error> {
    let mut buf = Vec::new();
    harness::write_rows(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { common } => solve(&common),
        Command::Simulate {
            common,
            table,
            policy,
            rounds,
            seed,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let kind: PolicyKind = policy.parse()?;
            let table = load_table(table.as_deref())?;
            let row = harness::simulate(&cfg, kind, table.as_ref(), rounds, seed, worker_threads())?;
            emit(common.out.as_deref(), &csv_text(&[row])?)?;
            Ok(())
        }
        Command::Sweep {
            common,
            axis,
            values,
            policy,
            rounds,
            seed,
            strict,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let policies = match policy {
                Some(list) => list
                    .split(',')
                    .map(str::parse)
                    .collect::<Result<Vec<PolicyKind>, _>>()?,
                None => PolicyKind::ALL.to_vec(),
            };
            let spec = SweepSpec {
                axis: axis.parse::<Axis>()?,
                values: harness::parse_values(&values)?,
                policies,
                n_rounds: rounds,
                seed,
            };
            let rows = harness::run_sweep(&cfg, &spec, worker_threads())?;
            emit(common.out.as_deref(), &csv_text(&rows)?)?;
            if let Some(out) = &common.out {
                harness::write_gnuplot(&out.with_extension("gp"), out, spec.axis, &spec.policies)?;
            }
            if strict {
                let bad = harness::strict_violations(&rows);
                if !bad.is_empty() {
                    return Err(Failure(4, format!("strict check failed:\n  {}", bad.join("\n  "))));
                }
            }
            Ok(())
        }
        Command::Validate {
            common,
            table,
            rounds,
            seed,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let table = load_table(table.as_deref())?;
            let opts = ValidateOptions {
                seed,
                rounds,
                ..ValidateOptions::default()
            };
            let report = harness::validate(&cfg, table.as_ref(), &opts)?;
            emit(common.out.as_deref(), &report.to_string())?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure(4, "validation failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
