//! Option resolution. Precedence per field: built-in default, then the
//! JSON config file given with --config, then the command-line flag.

use crate::RunError;
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Table format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// JSON file supplying defaults for this subcommand's options.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for iterative eigensolver starts.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Convergence tolerance for solvers and quadrature.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads; falls back to SPINPHASE_JOBS, then to all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Common option fields as they may appear in a config file.
#[derive(Deserialize, Default)]
pub struct CommonFile {
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub jobs: Option<usize>,
}

/// Fully resolved common options.
pub struct Common {
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub seed: u64,
    pub tol: f64,
    pub jobs: Option<usize>,
}

pub fn resolve_common(args: &CommonArgs, file: CommonFile) -> Result<Common, RunError> {
    let tol = args.tol.or(file.tol).unwrap_or(1e-10);
    if !tol.is_finite() || tol <= 0.0 {
        return Err(RunError::Config(format!("tolerance must be positive, got {tol}")));
    }
    let jobs = match args.jobs.or(file.jobs) {
        Some(j) => Some(j),
        None => match std::env::var("SPINPHASE_JOBS") {
            Ok(text) => Some(text.parse::<usize>().map_err(|_| {
                RunError::Config(format!("SPINPHASE_JOBS must be an integer, got {text:?}"))
            })?),
            Err(_) => None,
        },
    };
    if jobs == Some(0) {
        return Err(RunError::Config("jobs must be at least 1".into()));
    }
    Ok(Common {
        out: args.out.clone().or(file.out),
        format: args.format.or(file.format).unwrap_or(OutputFormat::Csv),
        seed: args.seed.or(file.seed).unwrap_or(7),
        tol,
        jobs,
    })
}

pub fn load_file<T: DeserializeOwned + Default>(path: Option<&PathBuf>) -> Result<T, RunError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| RunError::Config(format!("config {}: {e}", path.display())))
}

/// Inclusive grid with `steps` points; a single point sits at `a`.
pub fn linspace(a: f64, b: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![a];
    }
    (0..steps)
        .map(|i| a + (b - a) * i as f64 / (steps - 1) as f64)
        .collect()
}
