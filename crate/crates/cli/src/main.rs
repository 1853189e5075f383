//! Experiment runner: evolutions, sweeps, gate-count comparisons, readout
//! mitigation and circuit export, driven by TOML configs.

mod output;
mod runner;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "cdsim",
    version,
    about = "Digitized adiabatic evolution with CD driving"
)]
struct Cli {
    /// Experiment definition (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing)
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the config seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Also write SVG plots next to the CSV output
    #[arg(long, global = true)]
    svg: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one evolution and write the per-step series
    Evolve,
    /// Run a parameter sweep (axis and grid from the config)
    Sweep,
    /// Compare step and gate counts with and without the CD term
    Gatecount,
    /// Sample a noisy readout and mitigate it by matrix inversion
    MitigateDemo,
    /// Export the compiled circuit as OpenQASM 2
    ExportCircuit,
}

pub enum CliError {
    Config(String),
    Numerical(String),
}

impl From<cdsim::Error> for CliError {
    fn from(e: cdsim::Error) -> Self {
        use cdsim::Error::*;
        match e {
            ConvergenceFailure { .. } | SingularMatrix(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = runner::run(&cli);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
