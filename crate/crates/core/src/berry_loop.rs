//! Gauge-invariant Berry phases from discretized loops of states.
//!
//! The phase is accumulated segment by segment as -sum_j Arg<psi_j|psi_j+1>
//! with a final segment closing the loop, so windings beyond one branch of
//! Arg are tracked. Works on analytic two-level mode states and on
//! exact-diagonalization ground states of the rotated chain family.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::eigensolve::{
    dot, ground_state, ground_state_with_start, norm, spectral_gap, EigenError,
};
use crate::free_fermion::{analytic_mode_state, PhaseMethod, PhaseReport};
use crate::spin_model::{
    apply_hamiltonian_into, rotated_hamiltonian_apply_into, ChainSpec, Model, SpinModelError,
};

/// Splittings below this are treated as a degenerate ground space.
pub const DEGENERACY_GAP: f64 = 1e-8;
/// Segments with overlap magnitude at or below this are under-resolved.
pub const OVERLAP_FLOOR: f64 = 0.1;

#[derive(Debug, Error)]
pub enum LoopError {
    #[error("a loop needs at least 9 states (8 segments plus closure), got {0}")]
    TooFewStates(usize),
    #[error("loop states must share one dimension")]
    MixedDimensions,
    #[error("state {index} has norm {norm}, expected 1 within 1e-10")]
    NotNormalized { index: usize, norm: f64 },
    #[error(
        "overlap magnitude {magnitude:.3e} between states {segment} and {next} \
         is below {OVERLAP_FLOOR}; the loop is under-resolved"
    )]
    UnderResolved {
        segment: usize,
        next: usize,
        magnitude: f64,
    },
    #[error("ground and first excited level split by {gap:.3e} at phi = 0; the loop is degenerate")]
    DegenerateLoop { gap: f64 },
    #[error("the exact-diagonalization loop requires the transverse XY model")]
    WrongModel,
    #[error("the exact-diagonalization loop supports at most 16 sites, got {0}")]
    TooManySites(usize),
    #[error("steps must be at least 8, got {0}")]
    TooFewSteps(usize),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Spec(#[from] SpinModelError),
}

/// Unit-norm states at phi_j = j pi / steps, j = 0..steps. The closure
/// segment (last state back onto the first) belongs to the loop; segment
/// overlap magnitudes are checked during phase accumulation.
#[derive(Debug, Clone)]
pub struct StateLoop {
    states: Vec<Vec<Complex64>>,
}

impl StateLoop {
    pub fn new(states: Vec<Vec<Complex64>>) -> Result<Self, LoopError> {
        if states.len() < 9 {
            return Err(LoopError::TooFewStates(states.len()));
        }
        let dim = states[0].len();
        for (index, state) in states.iter().enumerate() {
            if state.len() != dim {
                return Err(LoopError::MixedDimensions);
            }
            let n = norm(state);
            if (n - 1.0).abs() > 1e-10 {
                return Err(LoopError::NotNormalized { index, norm: n });
            }
        }
        Ok(StateLoop { states })
    }

    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn states(&self) -> &[Vec<Complex64>] {
        &self.states
    }
}

/// -sum of segment phases around the closed loop. Invariant under per-state
/// phase redefinitions up to whole 2 pi windings.
pub fn wilson_loop_phase(state_loop: &StateLoop) -> Result<f64, LoopError> {
    let states = &state_loop.states;
    let count = states.len();
    let mut total = 0.0;
    for j in 0..count {
        let next = (j + 1) % count;
        let overlap = dot(&states[j], &states[next]);
        let magnitude = overlap.norm();
        if magnitude <= OVERLAP_FLOOR {
            return Err(LoopError::UnderResolved {
                segment: j,
                next,
                magnitude,
            });
        }
        total -= overlap.arg();
    }
    Ok(total)
}

/// Loop of analytic Bogoliubov mode states for one (lambda, phi_k) mode,
/// sampled at phi_j = j pi / steps.
pub fn analytic_mode_loop(lambda: f64, phi_k: f64, steps: usize) -> Result<StateLoop, LoopError> {
    if steps < 8 {
        return Err(LoopError::TooFewSteps(steps));
    }
    let states = (0..=steps)
        .map(|j| {
            let phi = std::f64::consts::PI * j as f64 / steps as f64;
            let (a, b) = analytic_mode_state(lambda, phi_k, phi);
            vec![a, b]
        })
        .collect();
    StateLoop::new(states)
}

/// Integer multiple of pi closest to a - b, with the leftover residual.
/// Used to compare loop phases that may differ by a parity offset.
pub fn pi_offset(a: f64, b: f64) -> (i64, f64) {
    let k = ((a - b) / std::f64::consts::PI).round();
    (k as i64, a - b - k * std::f64::consts::PI)
}

/// Berry phase of the exact ground state of H_phi around phi in [0, pi],
/// via ground-state solves on the grid and a Wilson loop over the results.
pub fn ed_berry_phase(
    spec: &ChainSpec,
    steps: usize,
    tol: f64,
    seed: u64,
) -> Result<PhaseReport, LoopError> {
    spec.validate()?;
    if spec.model != Model::TransverseXY {
        return Err(LoopError::WrongModel);
    }
    if spec.n_sites > 16 {
        return Err(LoopError::TooManySites(spec.n_sites));
    }
    if steps < 8 {
        return Err(LoopError::TooFewSteps(steps));
    }
    let dim = spec.dim();
    let base = spec.with_phi(0.0)?;

    // The H_phi family is unitary-equivalent across phi, so one gap check at
    // phi = 0 covers the whole loop.
    let gap = spectral_gap(
        |x: &[Complex64], y: &mut [Complex64]| apply_hamiltonian_into(&base, x, y).unwrap(),
        dim,
        tol,
        seed,
    )?;
    if gap < DEGENERACY_GAP {
        return Err(LoopError::DegenerateLoop { gap });
    }

    let mut states: Vec<Vec<Complex64>> = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let phi = std::f64::consts::PI * j as f64 / steps as f64;
        let spec_j = spec.with_phi(phi)?;
        let apply = |x: &[Complex64], y: &mut [Complex64]| {
            rotated_hamiltonian_apply_into(&spec_j, x, y).unwrap()
        };
        let result = match states.last() {
            // Warm starts keep consecutive solves in the same ground-space
            // branch, which is what makes maximal-overlap alignment work.
            Some(prev) => ground_state_with_start(apply, dim, tol, seed, prev)?,
            None => ground_state(apply, dim, tol, seed)?,
        };
        let mut vector = result.vector;
        if let Some(prev) = states.last() {
            // Align the solver's arbitrary global phase with the
            // predecessor. The Wilson loop is gauge invariant, so this only
            // conditions the per-segment Arg, it cannot change the total.
            let overlap = dot(prev, &vector);
            if overlap.norm() > 0.0 {
                let phase = overlap.conj() / overlap.norm();
                for v in &mut vector {
                    *v *= phase;
                }
            }
        }
        states.push(vector);
    }

    let gamma = wilson_loop_phase(&StateLoop::new(states)?)?;
    let mut metadata = BTreeMap::new();
    metadata.insert("n_sites".into(), spec.n_sites as f64);
    metadata.insert("lambda".into(), spec.lambda);
    metadata.insert("anisotropy".into(), spec.gamma);
    metadata.insert("steps".into(), steps as f64);
    metadata.insert("tol".into(), tol);
    metadata.insert("min_gap".into(), gap);
    Ok(PhaseReport::new(gamma, PhaseMethod::WilsonLoop, metadata))
}
