//! `bangbang`: closed-form concurrence traces, Fock-space reference runs, comparisons
//! between the two, pulse-interval scans and two-qubit state measures.
//!
//! Exit status: 0 success, 2 configuration error, 3 Fock truncation overflow,
//! 4 comparison outside tolerance, 1 anything else.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use bangbang_core::Error as CoreError;
use clap::{Args, Parser, Subcommand};

use commands::Sink;
use config::{ConfigError, Format, RunConfig};

#[derive(Parser)]
#[command(name = "bangbang", version, about = "Bell-pair dephasing under pi-pulse trains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    config: PathBuf,
    /// Override a configuration key, e.g. `--set schedule.N=4`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output file; overrides `output.path`. Defaults to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<(RunConfig, Sink)> {
        let cfg = config::load(&self.config, &self.overrides)?;
        let sink = Sink::new(cfg.output.path.clone(), self.output.clone(), cfg.output.format);
        Ok((cfg, sink))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form concurrence, entropy and purity over the configured time grid.
    Simulate(RunArgs),
    /// Truncated Fock-space evolution of the reduced two-qubit state.
    Oracle(RunArgs),
    /// Closed form against the Fock-space oracle; writes a JSON report.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Compare the closed form against its own predicted states instead of the oracle.
        #[arg(long)]
        self_compare: bool,
    },
    /// Sweep the pulse interval and optionally refine the peak.
    Scan(RunArgs),
    /// Concurrence, entropy, purity and spectrum of a density matrix file
    /// (16 complex entries row-major as `re im` pairs, basis |11>,|10>,|01>,|00>).
    Measures {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(a) => {
            let (cfg, sink) = a.load()?;
            commands::simulate(&cfg, &sink)?;
        }
        Command::Oracle(a) => {
            let (cfg, sink) = a.load()?;
            commands::oracle(&cfg, &sink)?;
        }
        Command::Compare { run, self_compare } => {
            let (cfg, mut sink) = run.load()?;
            sink.format = Format::Json;
            if !commands::compare_cmd(&cfg, self_compare, &sink)? {
                return Ok(ExitCode::from(4));
            }
        }
        Command::Scan(a) => {
            let (cfg, sink) = a.load()?;
            commands::scan(&cfg, &sink)?;
        }
        Command::Measures { input, output } => {
            commands::measures(&input, &Sink::new(None, output, Format::Json))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::TruncationOverflow { .. }) => 3,
        Some(CoreError::InvalidConfig(_) | CoreError::DimensionCap { .. }) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
