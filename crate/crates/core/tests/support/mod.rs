//! Independent oracles shared by the integration tests: a Kronecker-product
//! Hamiltonian builder, a quadruple-loop partial trace, and a fixed-step
//! quadrature rule. None of them share code paths with the library.

use nalgebra::DMatrix;
use num_complex::Complex64;
use spinphase_core::spin_model::{Boundary, ChainSpec, Model, StateVector};

pub fn identity2() -> DMatrix<Complex64> {
    DMatrix::identity(2, 2)
}

pub fn sigma_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::ZERO,
        Complex64::ONE,
        Complex64::ONE,
        Complex64::ZERO,
    ])
}

pub fn sigma_y() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::ZERO,
        Complex64::new(0.0, -1.0),
        Complex64::new(0.0, 1.0),
        Complex64::ZERO,
    ])
}

pub fn sigma_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::ONE,
        Complex64::ZERO,
        Complex64::ZERO,
        -Complex64::ONE,
    ])
}

/// Embeds single-site operators into the full 2^n space. Site i occupies
/// bit i of the basis index, so it is the i-th Kronecker factor from the
/// right.
pub fn embed(n: usize, ops: &[(usize, DMatrix<Complex64>)]) -> DMatrix<Complex64> {
    let mut full = DMatrix::identity(1, 1);
    for site in (0..n).rev() {
        let factor = ops
            .iter()
            .find(|(s, _)| *s == site)
            .map(|(_, op)| op.clone())
            .unwrap_or_else(identity2);
        full = full.kronecker(&factor);
    }
    full
}

/// Dense Hamiltonian assembled term by term from Kronecker products,
/// independently of the library's bit-twiddling matvec.
pub fn dense_hamiltonian(spec: &ChainSpec) -> DMatrix<Complex64> {
    let n = spec.n_sites;
    let dim = spec.dim();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    match spec.model {
        Model::TransverseXY => {
            let cx = Complex64::from(spec.lambda * (1.0 + spec.gamma) / 2.0);
            let cy = Complex64::from(spec.lambda * (1.0 - spec.gamma) / 2.0);
            for (i, j) in spec.bonds() {
                h -= embed(n, &[(i, sigma_x()), (j, sigma_x())]) * cx;
                h -= embed(n, &[(i, sigma_y()), (j, sigma_y())]) * cy;
            }
            for site in 0..n {
                h -= embed(n, &[(site, sigma_z())]);
            }
        }
        Model::HeisenbergAFM => {
            for (i, j) in spec.bonds() {
                for pauli in [sigma_x as fn() -> _, sigma_y, sigma_z] {
                    h += embed(n, &[(i, pauli()), (j, pauli())]) * Complex64::from(0.25);
                }
            }
        }
    }
    if spec.phi != 0.0 {
        let rot = DMatrix::from_fn(dim, dim, |r, c| {
            if r != c {
                return Complex64::ZERO;
            }
            let weight = n as f64 - 2.0 * (r.count_ones() as f64);
            Complex64::from_polar(1.0, 0.5 * spec.phi * weight)
        });
        h = &rot * h * rot.adjoint();
    }
    h
}

pub fn heisenberg_ring(n: usize) -> ChainSpec {
    ChainSpec::heisenberg_afm(n, Boundary::Periodic).expect("valid ring size")
}

/// Partial trace onto sites (i, j) by direct summation over index pairs
/// that agree outside the pair, in the |uu>, |ud>, |du>, |dd> basis with
/// site i the first arrow.
pub fn brute_force_rdm(state: &StateVector, i: usize, j: usize) -> [[Complex64; 4]; 4] {
    let dim = state.dim();
    let mask = (1usize << i) | (1usize << j);
    let keep = !mask;
    let slot = |idx: usize| (((idx >> i) & 1) << 1) | ((idx >> j) & 1);
    let mut rho = [[Complex64::ZERO; 4]; 4];
    for row_idx in 0..dim {
        for col_idx in 0..dim {
            if row_idx & keep == col_idx & keep {
                rho[slot(row_idx)][slot(col_idx)] +=
                    state.amplitudes[row_idx] * state.amplitudes[col_idx].conj();
            }
        }
    }
    rho
}

/// Composite Simpson on a fixed grid; `panels` must be even.
pub fn fixed_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels >= 2 && panels.is_multiple_of(2));
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for k in 1..panels {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

pub fn random_state(n: usize, rng: &mut impl rand::Rng) -> StateVector {
    let mut state = StateVector::zero(n);
    for a in state.amplitudes.iter_mut() {
        *a = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    }
    state.normalize();
    state
}
