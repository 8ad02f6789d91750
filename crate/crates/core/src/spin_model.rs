//! Spin-1/2 chain Hamiltonians as matrix-free actions on state vectors.
//!
//! Basis convention: bit `i` of a basis index addresses site `i`, with bit
//! value 0 meaning spin up (sigma^z eigenvalue +1). A chain of `n` sites
//! lives in a 2^n dimensional space.

use num_complex::Complex64;
use thiserror::Error;

/// Largest chain the dense state-vector representation accepts (16 MiB).
pub const MAX_SITES: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum SpinModelError {
    #[error("n_sites must be between 1 and {MAX_SITES}, got {0}")]
    BadSiteCount(usize),
    #[error("a two-site periodic ring traverses the same bond twice; use open boundaries")]
    PeriodicPair,
    #[error("{name} = {value} is outside {range}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("state has {found} amplitudes, spec requires {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// H = -sum_i [ lambda ( (1+gamma)/2 sx sx + (1-gamma)/2 sy sy ) + sz_i ]
    TransverseXY,
    /// H = +sum_i S_i . S_{i+1} with S = sigma/2 (antiferromagnetic sign).
    HeisenbergAFM,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Parameters pinning one chain Hamiltonian out of the rotated XY family
/// H_phi = R(phi) H R(-phi), where R(phi) is the uniform z rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub model: Model,
    pub n_sites: usize,
    pub boundary: Boundary,
    /// In-plane anisotropy in [0, 1]; 0 is the XX chain, 1 the Ising chain.
    /// Ignored by the Heisenberg model.
    pub gamma: f64,
    /// Exchange strength relative to the transverse field, >= 0.
    /// Ignored by the Heisenberg model.
    pub lambda: f64,
    /// Rotation angle of the in-plane exchange, in [0, pi].
    pub phi: f64,
}

impl ChainSpec {
    pub fn transverse_xy(
        n_sites: usize,
        boundary: Boundary,
        gamma: f64,
        lambda: f64,
    ) -> Result<Self, SpinModelError> {
        let spec = ChainSpec {
            model: Model::TransverseXY,
            n_sites,
            boundary,
            gamma,
            lambda,
            phi: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn heisenberg_afm(n_sites: usize, boundary: Boundary) -> Result<Self, SpinModelError> {
        let spec = ChainSpec {
            model: Model::HeisenbergAFM,
            n_sites,
            boundary,
            gamma: 0.0,
            lambda: 0.0,
            phi: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same chain with the exchange plane rotated by `phi`.
    pub fn with_phi(mut self, phi: f64) -> Result<Self, SpinModelError> {
        self.phi = phi;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SpinModelError> {
        if self.n_sites == 0 || self.n_sites > MAX_SITES {
            return Err(SpinModelError::BadSiteCount(self.n_sites));
        }
        if self.n_sites == 2 && self.boundary == Boundary::Periodic {
            return Err(SpinModelError::PeriodicPair);
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.phi) {
            return Err(SpinModelError::ParamOutOfRange {
                name: "phi",
                value: self.phi,
                range: "[0, pi]",
            });
        }
        if self.model == Model::TransverseXY {
            if !(0.0..=1.0).contains(&self.gamma) {
                return Err(SpinModelError::ParamOutOfRange {
                    name: "gamma",
                    value: self.gamma,
                    range: "[0, 1]",
                });
            }
            if !self.lambda.is_finite() || self.lambda < 0.0 {
                return Err(SpinModelError::ParamOutOfRange {
                    name: "lambda",
                    value: self.lambda,
                    range: "[0, inf)",
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_sites
    }

    /// Nearest-neighbour bonds; the periodic wrap bond is listed last.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_sites;
        let mut bonds: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic && n >= 3 {
            bonds.push((n - 1, 0));
        }
        bonds
    }
}

/// Dense complex amplitudes over the 2^n_sites computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub n_sites: usize,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n_sites: usize) -> Self {
        StateVector {
            n_sites,
            amplitudes: vec![Complex64::ZERO; 1 << n_sites],
        }
    }

    pub fn basis_state(n_sites: usize, index: usize) -> Self {
        let mut state = Self::zero(n_sites);
        state.amplitudes[index] = Complex64::ONE;
        state
    }

    pub fn from_amplitudes(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self, SpinModelError> {
        if amplitudes.len() != 1 << n_sites {
            return Err(SpinModelError::DimensionMismatch {
                expected: 1 << n_sites,
                found: amplitudes.len(),
            });
        }
        Ok(StateVector { n_sites, amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
    }

    /// <self|other>, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

fn check_dims(spec: &ChainSpec, input: &[Complex64], out: &[Complex64]) -> Result<(), SpinModelError> {
    spec.validate()?;
    let dim = spec.dim();
    for len in [input.len(), out.len()] {
        if len != dim {
            return Err(SpinModelError::DimensionMismatch {
                expected: dim,
                found: len,
            });
        }
    }
    Ok(())
}

/// out = H |input>, without materializing H.
pub fn apply_hamiltonian_into(
    spec: &ChainSpec,
    input: &[Complex64],
    out: &mut [Complex64],
) -> Result<(), SpinModelError> {
    check_dims(spec, input, out)?;
    out.fill(Complex64::ZERO);
    let n = spec.n_sites;
    let dim = spec.dim();
    let bonds = spec.bonds();
    match spec.model {
        Model::TransverseXY => {
            let lam = spec.lambda;
            let flip_equal = lam * spec.gamma;
            for idx in 0..dim {
                let a = input[idx];
                // Transverse field: -sum_i sz_i = -(n - 2 popcount).
                let field = n as f64 - 2.0 * idx.count_ones() as f64;
                out[idx] -= field * a;
                // In-plane exchange flips both spins of a bond. Equal bits
                // pick up the anisotropic weight, opposite bits the full one.
                for &(i, j) in &bonds {
                    let mask = (1usize << i) | (1usize << j);
                    let coeff = if ((idx >> i) ^ (idx >> j)) & 1 == 0 {
                        flip_equal
                    } else {
                        lam
                    };
                    out[idx ^ mask] -= coeff * a;
                }
            }
        }
        Model::HeisenbergAFM => {
            for idx in 0..dim {
                let a = input[idx];
                let mut diag = 0.0;
                for &(i, j) in &bonds {
                    if ((idx >> i) ^ (idx >> j)) & 1 == 0 {
                        diag += 0.25;
                    } else {
                        diag -= 0.25;
                        let mask = (1usize << i) | (1usize << j);
                        out[idx ^ mask] += 0.5 * a;
                    }
                }
                out[idx] += diag * a;
            }
        }
    }
    Ok(())
}

pub fn apply_hamiltonian(spec: &ChainSpec, state: &StateVector) -> Result<StateVector, SpinModelError> {
    let mut out = StateVector::zero(spec.n_sites);
    apply_hamiltonian_into(spec, &state.amplitudes, &mut out.amplitudes)?;
    Ok(out)
}

/// Phase factors of the uniform z rotation R(phi), one per popcount class.
fn rotation_table(n_sites: usize, phi: f64) -> Vec<Complex64> {
    (0..=n_sites)
        .map(|down| {
            let weight = n_sites as f64 - 2.0 * down as f64;
            Complex64::from_polar(1.0, 0.5 * phi * weight)
        })
        .collect()
}

/// R(phi)|state>, where R(phi) = exp(i phi sum_i sz_i / 2). Each basis
/// amplitude gains exp(i phi (n_up - n_down)/2).
pub fn apply_rotation(state: &StateVector, phi: f64) -> StateVector {
    let table = rotation_table(state.n_sites, phi);
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(idx, a)| a * table[idx.count_ones() as usize])
        .collect();
    StateVector {
        n_sites: state.n_sites,
        amplitudes,
    }
}

/// out = H_phi |input> with H_phi = R(phi) H R(-phi), phi taken from `spec.phi`.
pub fn rotated_hamiltonian_apply_into(
    spec: &ChainSpec,
    input: &[Complex64],
    out: &mut [Complex64],
) -> Result<(), SpinModelError> {
    check_dims(spec, input, out)?;
    let table = rotation_table(spec.n_sites, spec.phi);
    let rotated: Vec<Complex64> = input
        .iter()
        .enumerate()
        .map(|(idx, a)| a * table[idx.count_ones() as usize].conj())
        .collect();
    apply_hamiltonian_into(spec, &rotated, out)?;
    for (idx, o) in out.iter_mut().enumerate() {
        *o *= table[idx.count_ones() as usize];
    }
    Ok(())
}

pub fn rotated_hamiltonian_apply(
    spec: &ChainSpec,
    state: &StateVector,
) -> Result<StateVector, SpinModelError> {
    let mut out = StateVector::zero(spec.n_sites);
    rotated_hamiltonian_apply_into(spec, &state.amplitudes, &mut out.amplitudes)?;
    Ok(out)
}
