//! Batch front end: each subcommand sweeps one of the model families and
//! writes a flat CSV or JSON table with the effective configuration echoed
//! alongside the data.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use std::fmt;
use std::process::ExitCode;

/// Failures are split by exit code: bad requests (2) versus computations
/// that were asked for correctly but did not produce a usable number (3).
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numerical(String),
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "configuration: {msg}"),
            RunError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "spinphase",
    version,
    about = "Berry phases and two-site concurrence for driven spins and spin chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form two-spin sweep over the drive tilt angle.
    Toy(commands::ToyArgs),
    /// Transverse Ising chain sweep over the coupling lambda.
    Ising(commands::IsingArgs),
    /// Heisenberg antiferromagnet: exact value plus finite rings.
    Afm(commands::AfmArgs),
    /// Discrete Berry-phase loop checked against the mode sum.
    BerryLoop(commands::BerryLoopArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Toy(args) => commands::run_toy(args),
        Command::Ising(args) => commands::run_ising(args),
        Command::Afm(args) => commands::run_afm(args),
        Command::BerryLoop(args) => commands::run_berry_loop(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}
