//! `uavnet` — experiment runner for the dual-path CoMP-NOMA evaluator.
//!
//! Subcommands: `run <config>` executes an experiment and writes CSV,
//! `validate <config>` checks a configuration and prints its summary,
//! `defaults` prints the default configuration file. The `UAVNET_WORKERS`
//! environment variable caps the worker thread count; results are
//! byte-identical for any worker count.

mod config;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{default_config_text, describe, parse_config, validate_spec, PathSel};

#[derive(Parser)]
#[command(name = "uavnet", version, about = "Dual-path evaluator for CoMP-NOMA downlinks with aerial users")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a config file and write the CSV.
    Run {
        /// Path to the flat key-value config (see `uavnet defaults`).
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the Monte Carlo iteration count.
        #[arg(long)]
        iterations: Option<u64>,
        /// Override the output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the computation path (mc | analytic | both).
        #[arg(long)]
        path: Option<String>,
    },
    /// Parse and validate a config file without running it.
    Validate { config: PathBuf },
    /// Print the default configuration file.
    Defaults,
}

/// Usage / configuration error exit code.
const EXIT_USAGE: u8 = 2;
/// Numerical-failure exit code.
const EXIT_NUMERIC: u8 = 1;

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(workers) = std::env::var("UAVNET_WORKERS") {
        match workers.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: could not apply UAVNET_WORKERS={n}: {e}");
                }
            }
            _ => {
                eprintln!("error: UAVNET_WORKERS must be a positive integer, got `{workers}`");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }

    match cli.command {
        Command::Defaults => {
            print!("{}", default_config_text());
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(spec) => {
                println!("ok: {}", describe(&spec));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_USAGE)
            }
        },
        Command::Run {
            config,
            seed,
            iterations,
            out,
            path,
        } => {
            let mut spec = match load(&config) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            if let Some(s) = seed {
                spec.master_seed = s;
            }
            if let Some(n) = iterations {
                spec.iterations = n;
                spec.base.iterations = n;
            }
            if let Some(o) = out {
                spec.out = o;
            }
            if let Some(p) = path {
                spec.path = match PathSel::parse(&p) {
                    Ok(p) => p,
                    Err(e) => {
                        eprintln!("error: {e:#}");
                        return ExitCode::from(EXIT_USAGE);
                    }
                };
            }
            if let Err(e) = validate_spec(&spec) {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_USAGE);
            }
            match runner::run_experiment(&spec).and_then(|rows| {
                runner::write_csv(&rows, &spec.out)?;
                Ok(rows.len())
            }) {
                Ok(count) => {
                    println!("wrote {} rows to {}", count, spec.out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(EXIT_NUMERIC)
                }
            }
        }
    }
}

fn load(path: &PathBuf) -> anyhow::Result<config::ExperimentSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    parse_config(&text)
}
