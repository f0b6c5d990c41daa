//! `flywheel`: analyse and optimise the thickness profile of a flywheel.

mod commands;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::OptimizeArgs;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "flywheel", version, about = "Flywheel cross-section analysis and shape optimisation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mass, kinetic energy, peak stress and constraint status of a design.
    Evaluate {
        /// JSON configuration; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Control-point thicknesses in meters, comma separated.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        x: Vec<f64>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Stress distribution of a design as CSV, optionally plotted to SVG.
    Analyze {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        x: Vec<f64>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Maximise kinetic energy under the mass and stress limits.
    Optimize {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides `optimizer.random_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `optimizer.restarts`.
        #[arg(long)]
        restarts: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("FLYWHEEL_THREADS") {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "FLYWHEEL_THREADS must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Evaluate { config, x, json } => {
            let loaded = commands::load(config.as_deref())?;
            commands::evaluate(&loaded, &x, json)
        }
        Command::Analyze {
            config,
            x,
            csv,
            svg,
        } => {
            let loaded = commands::load(config.as_deref())?;
            commands::analyze(&loaded, &x, csv.as_deref(), svg.as_deref())
        }
        Command::Optimize {
            config,
            seed,
            restarts,
            out,
        } => {
            let threads = threads_from_env()?;
            let loaded = commands::load(config.as_deref())?;
            commands::optimize(
                &loaded,
                OptimizeArgs {
                    seed,
                    restarts,
                    threads,
                    out: &out,
                },
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
