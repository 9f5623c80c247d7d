//! Command-line front end for `walkvisits-core`.
//!
//! Every subcommand builds an [`OutputRecord`] and writes it as CSV or JSON
//! to stdout or, atomically, to `--out`. Exit codes: 0 success, 1 failed
//! verification (or a simulation outside its TV threshold), 2 usage or
//! domain error.

pub mod commands;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use walkvisits_core::asymptotics::GridAxis;
use walkvisits_core::verify::Depth;
use walkvisits_core::WalkError;

use commands::{Fault, SimulateArgs, Which};
pub use output::{Cell, Format, OutputError, OutputRecord, Table};

pub const THREADS_ENV: &str = "WALKVISITS_THREADS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "walkvisits", version, about = "Exact position/visit-count law of a symmetric lattice walk")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,

    /// Write here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DepthArg {
    Quick,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full joint table of (X, K).
    Joint {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_negative_numbers = true)]
        z: i64,
    },
    /// Distribution of X or of K alone.
    Marginal {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_negative_numbers = true)]
        z: i64,
    },
    /// E(X), E(X^2), E(K), E(K^2).
    Moments {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_negative_numbers = true)]
        z: i64,
    },
    /// Diffusion-limit density on a grid, with its ridge and C(z).
    Limit {
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        /// `xmin:xmax:points,kmin:kmax:points`.
        #[arg(long, default_value = "-3:3:61,0:3:31", allow_hyphen_values = true)]
        grid: String,
    },
    /// Monte Carlo histogram compared with the exact table.
    Simulate {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_negative_numbers = true)]
        z: i64,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit 1 if the total variation distance exceeds this.
        #[arg(long, default_value_t = 0.01)]
        tv_threshold: f64,
    },
    /// Cross-check the closed form against the oracles.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        depth: DepthArg,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] WalkError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

/// A built record and whether its checks passed.
pub struct Outcome {
    pub record: OutputRecord,
    pub passed: bool,
}

/// Worker count: available parallelism, capped by `WALKVISITS_THREADS`.
pub fn worker_count() -> Result<usize, CliError> {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(cap) if cap >= 1 => Ok(cap.min(available)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(available),
    }
}

fn parse_axis(spec: &str) -> Result<GridAxis, CliError> {
    let bad = || CliError::Usage(format!("grid axis {spec:?} is not min:max:points"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [min, max, points] = parts[..] else {
        return Err(bad());
    };
    let min: f64 = min.trim().parse().map_err(|_| bad())?;
    let max: f64 = max.trim().parse().map_err(|_| bad())?;
    let points: usize = points.trim().parse().map_err(|_| bad())?;
    Ok(GridAxis::new(min, max, points)?)
}

/// Parses `xmin:xmax:points,kmin:kmax:points`.
pub fn parse_grid(spec: &str) -> Result<(GridAxis, GridAxis), CliError> {
    let (x, k) = spec
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("grid {spec:?} needs an x axis and a k axis separated by ','")))?;
    Ok((parse_axis(x)?, parse_axis(k)?))
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    let done = |record| Ok(Outcome { record, passed: true });
    match *command {
        Command::Joint { n, z } => done(commands::joint(n, z)?),
        Command::Marginal { which, n, z } => done(commands::marginal(n, z, which)?),
        Command::Moments { n, z } => done(commands::moments(n, z)?),
        Command::Limit { z, ref grid } => {
            let (x_axis, k_axis) = parse_grid(grid)?;
            done(commands::limit(z, grid, x_axis, k_axis)?)
        }
        Command::Simulate {
            n,
            z,
            trials,
            seed,
            tv_threshold,
        } => {
            if tv_threshold.is_nan() || tv_threshold < 0.0 {
                return Err(CliError::Usage(format!("--tv-threshold must be non-negative, got {tv_threshold}")));
            }
            let args = SimulateArgs {
                n,
                z,
                trials,
                seed,
                tv_threshold,
                workers: worker_count()?,
            };
            let (record, passed) = commands::simulate_cmd(&args)?;
            Ok(Outcome { record, passed })
        }
        Command::Verify { depth, inject_fault } => {
            let depth = match depth {
                DepthArg::Quick => Depth::Quick,
                DepthArg::Full => Depth::Full,
            };
            let (record, report) = commands::verify_cmd(depth, inject_fault, worker_count()?);
            for c in &report.checks {
                eprintln!("{c}");
            }
            Ok(Outcome {
                record,
                passed: report.passed(),
            })
        }
    }
}

/// Runs a parsed invocation and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    match run_inner(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY_FAILED,
        Err(e) => {
            eprintln!("walkvisits: {e}");
            EXIT_USAGE
        }
    }
}

fn run_inner(cli: &Cli) -> Result<bool, CliError> {
    let outcome = execute(&cli.command)?;
    let text = outcome.record.encode(cli.format)?;
    match &cli.out {
        Some(path) => output::write_atomic(path, text.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(outcome.passed)
}
