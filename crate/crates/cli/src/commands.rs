//! The four sweep commands. Each validates its request up front (exit 2
//! territory), computes rows in deterministic sweep order with an optional
//! bounded worker pool, and only then touches the output path.

use crate::config::{linspace, load_file, resolve_common, CommonArgs, CommonFile, OutputFormat};
use crate::output::{emit, Cell, Table};
use crate::RunError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spinphase_core::afm::{ed_afm_report, exact_afm_report};
use spinphase_core::berry_loop::{ed_berry_phase, pi_offset};
use spinphase_core::eigensolve::{ground_state, spectral_gap};
use spinphase_core::entangle::{reduced_density_matrix, wootters_concurrence};
use spinphase_core::free_fermion::{berry_phase_mode_sum, berry_phase_thermo, concurrence_from_phase};
use spinphase_core::spin_model::{
    apply_hamiltonian_into, Boundary, ChainSpec, StateVector,
};
use spinphase_core::toy_two_spin::{
    adiabatic_geometric_phase, analytic_berry_phases, concurrence_theta, mu_factors, ToyParams,
};
use std::f64::consts::PI;

/// Runs `work` on a pool of `jobs` threads when a bound was requested,
/// otherwise on the default global pool.
fn with_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T, RunError> {
    match jobs {
        None => Ok(work()),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| RunError::Config(format!("cannot build worker pool: {e}")))
            .map(|pool| pool.install(work)),
    }
}

// ---------------------------------------------------------------- toy ----

#[derive(clap::Args, Debug)]
pub struct ToyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Points on the inclusive [0, pi] tilt-angle grid.
    #[arg(long)]
    pub theta_steps: Option<usize>,
    /// Also propagate the drive numerically at each grid point.
    #[arg(long)]
    pub adiabatic: bool,
    /// Drive-to-splitting ratio omega0 / field_scale for --adiabatic.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Integrator steps per drive period for --adiabatic.
    #[arg(long)]
    pub time_steps: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct ToyFile {
    out: Option<std::path::PathBuf>,
    format: Option<OutputFormat>,
    seed: Option<u64>,
    tol: Option<f64>,
    jobs: Option<usize>,
    theta_steps: Option<usize>,
    adiabatic: Option<bool>,
    ratio: Option<f64>,
    time_steps: Option<usize>,
}

#[derive(Serialize)]
struct ToyEcho {
    command: &'static str,
    theta_steps: usize,
    adiabatic: bool,
    ratio: f64,
    time_steps: usize,
    format: OutputFormat,
    seed: u64,
    tol: f64,
    jobs: Option<usize>,
}

pub fn run_toy(args: ToyArgs) -> Result<(), RunError> {
    let file: ToyFile = load_file(args.common.config.as_ref())?;
    let common = resolve_common(
        &args.common,
        CommonFile {
            out: file.out,
            format: file.format,
            seed: file.seed,
            tol: file.tol,
            jobs: file.jobs,
        },
    )?;
    let theta_steps = args.theta_steps.or(file.theta_steps).unwrap_or(181);
    let adiabatic = args.adiabatic || file.adiabatic.unwrap_or(false);
    let ratio = args.ratio.or(file.ratio).unwrap_or(0.01);
    let time_steps = args.time_steps.or(file.time_steps).unwrap_or(100_000);
    if theta_steps == 0 {
        return Err(RunError::Config("theta grid is empty (theta-steps = 0)".into()));
    }
    if adiabatic {
        // Surfaces bad rates or step counts before any propagation runs.
        ToyParams::new(PI / 2.0, ratio, 1.0, time_steps)
            .map_err(|e| RunError::Config(e.to_string()))?;
    }

    let grid = linspace(0.0, PI, theta_steps);
    let rows = with_pool(common.jobs, || {
        grid.par_iter()
            .map(|&theta| -> Result<Vec<Cell>, RunError> {
                let (gamma_plus, gamma_minus) = analytic_berry_phases(theta);
                let (mu_plus, _) = mu_factors(theta);
                let c_phase = concurrence_from_phase(gamma_plus);
                let mut row = vec![
                    Cell::Float(theta),
                    Cell::Float(gamma_plus),
                    Cell::Float(gamma_minus),
                    Cell::Float(mu_plus.abs()),
                    Cell::Float(concurrence_theta(theta)),
                    Cell::Float(c_phase),
                ];
                if adiabatic {
                    let params = ToyParams::new(theta, ratio, 1.0, time_steps)
                        .map_err(|e| RunError::Config(e.to_string()))?;
                    let out = adiabatic_geometric_phase(&params)
                        .map_err(|e| RunError::Numerical(format!("theta = {theta}: {e}")))?;
                    row.push(Cell::Float(out.gamma_plus));
                    row.push(Cell::Float(out.leakage_plus));
                }
                row.push(Cell::Bool(c_phase > 1.0));
                Ok(row)
            })
            .collect::<Result<Vec<_>, _>>()
    })??;

    let mut headers = vec![
        "theta",
        "gamma_plus",
        "gamma_minus",
        "mu_plus_abs",
        "concurrence_analytic",
        "concurrence_from_phase",
    ];
    if adiabatic {
        headers.push("gamma_plus_numeric");
        headers.push("leakage");
    }
    headers.push("concurrence_out_of_range");

    let echo = ToyEcho {
        command: "toy",
        theta_steps,
        adiabatic,
        ratio,
        time_steps,
        format: common.format,
        seed: common.seed,
        tol: common.tol,
        jobs: common.jobs,
    };
    emit(&Table { headers, rows }, &echo, common.format, common.out.as_deref())
}

// -------------------------------------------------------------- ising ----

#[derive(clap::Args, Debug)]
pub struct IsingArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Lower end of the coupling grid.
    #[arg(long)]
    pub lambda_min: Option<f64>,
    /// Upper end of the coupling grid.
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// Points on the inclusive coupling grid.
    #[arg(long)]
    pub lambda_steps: Option<usize>,
    /// Chain length for the per-mode mean column (odd, at least 3).
    #[arg(long)]
    pub mode_n: Option<usize>,
    /// Add Wootters-concurrence and gap columns from exact diagonalization.
    #[arg(long)]
    pub ed: bool,
    /// Periodic ring size for --ed (3 to 16).
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct IsingFile {
    out: Option<std::path::PathBuf>,
    format: Option<OutputFormat>,
    seed: Option<u64>,
    tol: Option<f64>,
    jobs: Option<usize>,
    lambda_min: Option<f64>,
    lambda_max: Option<f64>,
    lambda_steps: Option<usize>,
    mode_n: Option<usize>,
    ed: Option<bool>,
    n: Option<usize>,
}

#[derive(Serialize)]
struct IsingEcho {
    command: &'static str,
    lambda_min: f64,
    lambda_max: f64,
    lambda_steps: usize,
    mode_n: usize,
    ed: bool,
    n: usize,
    format: OutputFormat,
    seed: u64,
    tol: f64,
    jobs: Option<usize>,
}

fn ising_ed_columns(n: usize, lambda: f64, tol: f64, seed: u64) -> Result<(f64, f64), RunError> {
    let spec = ChainSpec::transverse_xy(n, Boundary::Periodic, 1.0, lambda)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let apply = |input: &[spinphase_core::Complex64], output: &mut [spinphase_core::Complex64]| {
        apply_hamiltonian_into(&spec, input, output).expect("dimensions fixed by spec");
    };
    let context = format!("ED at lambda = {lambda}, n = {n}");
    let ground = ground_state(apply, spec.dim(), tol, seed)
        .map_err(|e| RunError::Numerical(format!("{context}: {e}")))?;
    let mut state = StateVector::from_amplitudes(n, ground.vector)
        .map_err(|e| RunError::Numerical(format!("{context}: {e}")))?;
    state.normalize();
    let rho = reduced_density_matrix(&state, 0, 1)
        .map_err(|e| RunError::Numerical(format!("{context}: {e}")))?;
    let wootters = wootters_concurrence(&rho)
        .map_err(|e| RunError::Numerical(format!("{context}: {e}")))?;
    let gap = spectral_gap(apply, spec.dim(), tol, seed)
        .map_err(|e| RunError::Numerical(format!("{context}: {e}")))?;
    Ok((wootters, gap))
}

pub fn run_ising(args: IsingArgs) -> Result<(), RunError> {
    let file: IsingFile = load_file(args.common.config.as_ref())?;
    let common = resolve_common(
        &args.common,
        CommonFile {
            out: file.out,
            format: file.format,
            seed: file.seed,
            tol: file.tol,
            jobs: file.jobs,
        },
    )?;
    let lambda_min = args.lambda_min.or(file.lambda_min).unwrap_or(0.0);
    let lambda_max = args.lambda_max.or(file.lambda_max).unwrap_or(2.0);
    let lambda_steps = args.lambda_steps.or(file.lambda_steps).unwrap_or(21);
    let mode_n = args.mode_n.or(file.mode_n).unwrap_or(1001);
    let ed = args.ed || file.ed.unwrap_or(false);
    let n = args.n.or(file.n).unwrap_or(12);

    if lambda_steps == 0 {
        return Err(RunError::Config("lambda grid is empty (lambda-steps = 0)".into()));
    }
    if !lambda_min.is_finite() || !lambda_max.is_finite() || lambda_min < 0.0 {
        return Err(RunError::Config(format!(
            "coupling grid must be finite and nonnegative, got [{lambda_min}, {lambda_max}]"
        )));
    }
    if lambda_max < lambda_min {
        return Err(RunError::Config(format!(
            "lambda-max {lambda_max} is below lambda-min {lambda_min}"
        )));
    }
    if mode_n < 3 || mode_n.is_multiple_of(2) {
        return Err(RunError::Config(format!(
            "mode-n must be odd and at least 3, got {mode_n}"
        )));
    }
    if ed && !(3..=16).contains(&n) {
        return Err(RunError::Config(format!("ED ring size must be 3 to 16, got {n}")));
    }

    let grid = linspace(lambda_min, lambda_max, lambda_steps);
    let (tol, seed) = (common.tol, common.seed);
    let rows = with_pool(common.jobs, || {
        grid.par_iter()
            .map(|&lambda| -> Result<Vec<Cell>, RunError> {
                let thermo = berry_phase_thermo(lambda, tol)
                    .map_err(|e| RunError::Numerical(format!("lambda = {lambda}: {e}")))?;
                let mode = berry_phase_mode_sum(mode_n, lambda)
                    .map_err(|e| RunError::Numerical(format!("lambda = {lambda}: {e}")))?;
                let mean = *mode
                    .metadata
                    .get("gamma_per_mode_mean")
                    .expect("mode sum always records the mean");
                let mut row = vec![
                    Cell::Float(lambda),
                    Cell::Float(thermo.gamma),
                    Cell::Float(mean),
                    Cell::Float(thermo.concurrence),
                ];
                if ed {
                    let (wootters, gap) = ising_ed_columns(n, lambda, tol, seed)?;
                    row.push(Cell::Float(wootters));
                    row.push(Cell::Float(gap));
                }
                row.push(Cell::Bool(thermo.out_of_range));
                Ok(row)
            })
            .collect::<Result<Vec<_>, _>>()
    })??;

    let mut headers = vec!["lambda", "gamma_thermo", "gamma_modesum_mean", "concurrence_phase"];
    if ed {
        headers.push("concurrence_wootters_ed");
        headers.push("ed_gap");
    }
    headers.push("concurrence_out_of_range");

    let echo = IsingEcho {
        command: "ising",
        lambda_min,
        lambda_max,
        lambda_steps,
        mode_n,
        ed,
        n,
        format: common.format,
        seed: common.seed,
        tol: common.tol,
        jobs: common.jobs,
    };
    emit(&Table { headers, rows }, &echo, common.format, common.out.as_deref())
}

// ---------------------------------------------------------------- afm ----

#[derive(clap::Args, Debug)]
pub struct AfmArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Ring sizes to diagonalize (even, 2 to 16), besides the exact row.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct AfmFile {
    out: Option<std::path::PathBuf>,
    format: Option<OutputFormat>,
    seed: Option<u64>,
    tol: Option<f64>,
    jobs: Option<usize>,
    sizes: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct AfmEcho {
    command: &'static str,
    sizes: Vec<usize>,
    format: OutputFormat,
    seed: u64,
    tol: f64,
    jobs: Option<usize>,
}

pub fn run_afm(args: AfmArgs) -> Result<(), RunError> {
    let file: AfmFile = load_file(args.common.config.as_ref())?;
    let common = resolve_common(
        &args.common,
        CommonFile {
            out: file.out,
            format: file.format,
            seed: file.seed,
            tol: file.tol,
            jobs: file.jobs,
        },
    )?;
    let sizes = args.sizes.or(file.sizes).unwrap_or_else(|| vec![4, 8, 12]);
    if sizes.is_empty() {
        return Err(RunError::Config("ring size list is empty".into()));
    }
    for &n in &sizes {
        if n % 2 != 0 || !(2..=16).contains(&n) {
            return Err(RunError::Config(format!(
                "ring sizes must be even and within 2..=16, got {n}"
            )));
        }
    }

    let exact = exact_afm_report();
    let mut rows = vec![vec![
        Cell::Text("exact_bethe"),
        Cell::Int(0),
        Cell::Float(exact.e_g),
        Cell::Float(exact.gamma_af),
        Cell::Float(exact.concurrence),
        Cell::Float(exact.wootters_nn),
        Cell::Bool(exact.concurrence > 1.0),
    ]];
    let ed_rows = with_pool(common.jobs, || {
        sizes
            .par_iter()
            .map(|&n| -> Result<Vec<Cell>, RunError> {
                let report = ed_afm_report(n)
                    .map_err(|e| RunError::Numerical(format!("n = {n}: {e}")))?;
                Ok(vec![
                    Cell::Text("ed"),
                    Cell::Int(n as i64),
                    Cell::Float(report.e_g),
                    Cell::Float(report.gamma_af),
                    Cell::Float(report.concurrence),
                    Cell::Float(report.wootters_nn),
                    Cell::Bool(report.concurrence > 1.0),
                ])
            })
            .collect::<Result<Vec<_>, _>>()
    })??;
    rows.extend(ed_rows);

    let headers = vec![
        "source",
        "n",
        "e_g",
        "gamma_af",
        "concurrence",
        "wootters_nn",
        "concurrence_out_of_range",
    ];
    let echo = AfmEcho {
        command: "afm",
        sizes,
        format: common.format,
        seed: common.seed,
        tol: common.tol,
        jobs: common.jobs,
    };
    emit(&Table { headers, rows }, &echo, common.format, common.out.as_deref())
}

// --------------------------------------------------------- berry-loop ----

#[derive(clap::Args, Debug)]
pub struct BerryLoopArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Periodic ring size (odd, 3 to 15, so every mode has a partner sum).
    #[arg(long)]
    pub n: Option<usize>,
    /// Transverse Ising coupling.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Loop discretizations to tabulate, one row each (at least 8).
    #[arg(long, value_delimiter = ',')]
    pub steps: Option<Vec<usize>>,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct BerryLoopFile {
    out: Option<std::path::PathBuf>,
    format: Option<OutputFormat>,
    seed: Option<u64>,
    tol: Option<f64>,
    jobs: Option<usize>,
    n: Option<usize>,
    lambda: Option<f64>,
    steps: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct BerryLoopEcho {
    command: &'static str,
    n: usize,
    lambda: f64,
    steps: Vec<usize>,
    format: OutputFormat,
    seed: u64,
    tol: f64,
    jobs: Option<usize>,
}

pub fn run_berry_loop(args: BerryLoopArgs) -> Result<(), RunError> {
    let file: BerryLoopFile = load_file(args.common.config.as_ref())?;
    let common = resolve_common(
        &args.common,
        CommonFile {
            out: file.out,
            format: file.format,
            seed: file.seed,
            tol: file.tol,
            jobs: file.jobs,
        },
    )?;
    let n = args.n.or(file.n).unwrap_or(5);
    let lambda = args.lambda.or(file.lambda).unwrap_or(0.5);
    let steps_list = args.steps.or(file.steps).unwrap_or_else(|| vec![512]);

    if n.is_multiple_of(2) || !(3..=15).contains(&n) {
        return Err(RunError::Config(format!(
            "ring size must be odd and within 3..=15, got {n}"
        )));
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(RunError::Config(format!(
            "coupling must be finite and nonnegative, got {lambda}"
        )));
    }
    if steps_list.is_empty() {
        return Err(RunError::Config("steps list is empty".into()));
    }
    if let Some(&bad) = steps_list.iter().find(|&&s| s < 8) {
        return Err(RunError::Config(format!("need at least 8 loop steps, got {bad}")));
    }

    let spec = ChainSpec::transverse_xy(n, Boundary::Periodic, 1.0, lambda)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let (tol, seed) = (common.tol, common.seed);
    let rows = with_pool(common.jobs, || {
        steps_list
            .par_iter()
            .map(|&steps| -> Result<Vec<Cell>, RunError> {
                let ed = ed_berry_phase(&spec, steps, tol, seed).map_err(|e| {
                    RunError::Numerical(format!(
                        "loop at lambda = {lambda}, n = {n}, steps = {steps}: {e}"
                    ))
                })?;
                let mode = berry_phase_mode_sum(n, lambda)
                    .map_err(|e| RunError::Numerical(format!("mode sum at lambda = {lambda}: {e}")))?;
                let (offset, residual) = pi_offset(ed.gamma, mode.gamma);
                Ok(vec![
                    Cell::Int(n as i64),
                    Cell::Float(lambda),
                    Cell::Int(steps as i64),
                    Cell::Float(ed.gamma),
                    Cell::Float(mode.gamma),
                    Cell::Float(residual.abs()),
                    Cell::Int(offset),
                ])
            })
            .collect::<Result<Vec<_>, _>>()
    })??;

    let headers = vec![
        "n",
        "lambda",
        "steps",
        "gamma_wilson",
        "gamma_modesum",
        "abs_diff",
        "offset_multiple_of_pi",
    ];
    let echo = BerryLoopEcho {
        command: "berry-loop",
        n,
        lambda,
        steps: steps_list,
        format: common.format,
        seed: common.seed,
        tol: common.tol,
        jobs: common.jobs,
    };
    emit(&Table { headers, rows }, &echo, common.format, common.out.as_deref())
}
