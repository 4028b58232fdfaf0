//! `qfridge`: steady states, time evolution, sweeps and figure presets for
//! few-level absorption refrigerators.
//!
//! Exit codes: 0 success, 1 usage error, 2 convergence failure, 3 validation
//! failure.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use log::LevelFilter;

use commands::{Format, Options, Outcome};
use error::CliError;
use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "qfridge", version, about = "Few-level quantum absorption refrigerator simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override a configuration key, e.g. `--set Th=4` or `--set sweep.axis=p2`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Output file; a manifest is written beside it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format (default: from the --out extension, else csv).
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,

    /// Solver tolerance; for `validate`, replaces every check threshold.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Log more (-v warnings, -vv progress).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stationary temperatures and heat currents.
    Steady,
    /// Integrate the master equation from an initial state.
    Evolve,
    /// One-parameter sweep from the [sweep] section.
    Sweep,
    /// Run a figure preset (fig1 .. fig6).
    Figure { id: String },
    /// Built-in invariant checks.
    Validate {
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FaultArg {
    CommutatorSign,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => LevelFilter::Error,
        1 => LevelFilter::Warn,
        _ => LevelFilter::Info,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    configure_threads(cli.threads)?;
    if let Some(tol) = cli.tol {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
        }
    }
    let opts = Options {
        out: cli.out.as_deref(),
        format: Format::resolve(cli.format, cli.out.as_deref()),
        tol: cli.tol,
    };
    let load = || config::load(cli.config.as_deref(), &cli.overrides);

    let (name, outcome): (&str, Outcome) = match &cli.command {
        Command::Steady => ("steady", commands::steady(&load()?, &opts)?),
        Command::Evolve => ("evolve", commands::evolve_cmd(&load()?, &opts)?),
        Command::Sweep => ("sweep", commands::sweep(&load()?, &opts)?),
        Command::Figure { id } => ("figure", commands::figure(id, &opts)?),
        Command::Validate { inject_fault } => {
            let fault = inject_fault.map(|f| match f {
                FaultArg::CommutatorSign => qfridge::dynamics::Fault::CommutatorSign,
            });
            ("validate", commands::validate(&opts, fault)?)
        }
    };

    if let Some(out) = &cli.out {
        let manifest = RunManifest {
            command: name.to_string(),
            args: std::env::args().skip(1).collect(),
            resolved: outcome.resolved,
            outputs: outcome.outputs.iter().map(|p| p.display().to_string()).collect(),
            version: qfridge::VERSION.to_string(),
            wall_time_s: start.elapsed().as_secs_f64(),
        };
        manifest.write(&RunManifest::path_for(out))?;
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    if threads.is_some_and(|n| n > 1) {
        log::warn!("built without the `parallel` feature; --threads is ignored");
    }
    Ok(())
}
