//! Two-site reduced density matrices and concurrence.
//!
//! The mixed-state concurrence follows the spin-flip construction: with
//! rho_tilde = (sy x sy) rho* (sy x sy), the concurrence is
//! max(0, l1 - l2 - l3 - l4) over the descending square roots l_i of the
//! eigenvalues of rho rho_tilde.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::eigensolve::{dense_eigh, EigenError};
use crate::spin_model::StateVector;

#[derive(Debug, Error)]
pub enum EntangleError {
    #[error("site index {index} out of range for {n_sites} sites")]
    SiteOutOfRange { index: usize, n_sites: usize },
    #[error("site pair must satisfy i < j, got ({0}, {1})")]
    BadSitePair(usize, usize),
    #[error("state norm is {0:.6}, expected 1")]
    NotNormalized(f64),
    #[error("density matrix deviates from Hermitian by {0:.3e}, beyond 1e-12")]
    NotHermitian(f64),
    #[error("density matrix trace deviates from 1 by {0:.3e}, beyond 1e-12")]
    BadTrace(f64),
    #[error("density matrix eigenvalue {0:.3e} is below -1e-10")]
    NegativeEigenvalue(f64),
    #[error("werner weight {0} outside [-1/3, 1]")]
    BadWernerWeight(f64),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// Two-qubit density matrix in the basis |uu>, |ud>, |du>, |dd>, where the
/// first arrow is the smaller site index of `site_pair`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    pub entries: [[Complex64; 4]; 4],
    pub site_pair: (usize, usize),
}

impl DensityMatrix4 {
    pub fn new(entries: [[Complex64; 4]; 4], site_pair: (usize, usize)) -> Result<Self, EntangleError> {
        let rho = DensityMatrix4 { entries, site_pair };
        rho.validate()?;
        Ok(rho)
    }

    /// Hermiticity and trace within 1e-12, eigenvalues above -1e-10.
    pub fn validate(&self) -> Result<(), EntangleError> {
        let e = &self.entries;
        let mut herm_dev = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                herm_dev = herm_dev.max((e[r][c] - e[c][r].conj()).norm());
            }
        }
        if herm_dev > 1e-12 {
            return Err(EntangleError::NotHermitian(herm_dev));
        }
        let trace: Complex64 = (0..4).map(|k| e[k][k]).sum();
        let trace_dev = (trace - Complex64::ONE).norm();
        if trace_dev > 1e-12 {
            return Err(EntangleError::BadTrace(trace_dev));
        }
        let (vals, _) = dense_eigh(&self.to_dmatrix())?;
        if vals[0] < -1e-10 {
            return Err(EntangleError::NegativeEigenvalue(vals[0]));
        }
        Ok(())
    }

    pub fn trace_of_square(&self) -> f64 {
        let mut purity = Complex64::ZERO;
        for r in 0..4 {
            for c in 0..4 {
                purity += self.entries[r][c] * self.entries[c][r];
            }
        }
        purity.re
    }

    fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(4, 4, |r, c| self.entries[r][c])
    }
}

/// Werner state p |psi-><psi-| + (1 - p) I/4 on sites (0, 1). Positive for
/// p in [-1/3, 1]; its concurrence is max(0, (3p - 1)/2).
pub fn werner_state(p: f64) -> Result<DensityMatrix4, EntangleError> {
    if !(-1.0 / 3.0..=1.0).contains(&p) {
        return Err(EntangleError::BadWernerWeight(p));
    }
    let mut entries = [[Complex64::ZERO; 4]; 4];
    for k in 0..4 {
        entries[k][k] = Complex64::new((1.0 - p) / 4.0, 0.0);
    }
    entries[1][1] += Complex64::new(0.5 * p, 0.0);
    entries[2][2] += Complex64::new(0.5 * p, 0.0);
    entries[1][2] -= Complex64::new(0.5 * p, 0.0);
    entries[2][1] -= Complex64::new(0.5 * p, 0.0);
    Ok(DensityMatrix4 {
        entries,
        site_pair: (0, 1),
    })
}

/// Partial trace of a pure chain state onto sites i < j.
pub fn reduced_density_matrix(
    state: &StateVector,
    i: usize,
    j: usize,
) -> Result<DensityMatrix4, EntangleError> {
    let n = state.n_sites;
    if i >= j {
        return Err(EntangleError::BadSitePair(i, j));
    }
    if j >= n {
        return Err(EntangleError::SiteOutOfRange { index: j, n_sites: n });
    }
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(EntangleError::NotNormalized(norm));
    }
    let mask_i = 1usize << i;
    let mask_j = 1usize << j;
    let mut entries = [[Complex64::ZERO; 4]; 4];
    for (idx, a) in state.amplitudes.iter().enumerate() {
        let row = (((idx >> i) & 1) << 1) | ((idx >> j) & 1);
        let rest = idx & !(mask_i | mask_j);
        for (col, entry) in entries[row].iter_mut().enumerate() {
            let other = rest
                | (if col & 2 != 0 { mask_i } else { 0 })
                | (if col & 1 != 0 { mask_j } else { 0 });
            *entry += a * state.amplitudes[other].conj();
        }
    }
    // Divide by the squared norm so the trace is exactly the normalized one
    // even when the input norm sits at the tolerance edge.
    let norm_sqr = norm * norm;
    for row in &mut entries {
        for entry in row.iter_mut() {
            *entry /= norm_sqr;
        }
    }
    Ok(DensityMatrix4 {
        entries,
        site_pair: (i, j),
    })
}

/// Concurrence of a pure superposition a|ud> + b|du>. No normalization is
/// applied to the amplitudes.
pub fn pure_concurrence(a: Complex64, b: Complex64) -> f64 {
    2.0 * a.norm() * b.norm()
}

/// Wootters concurrence of a two-qubit density matrix, clipped to [0, 1].
pub fn wootters_concurrence(rho: &DensityMatrix4) -> Result<f64, EntangleError> {
    rho.validate()?;
    let m = rho.to_dmatrix();
    let (vals, vecs) = dense_eigh(&m)?;
    // sqrt(rho), with round-off negatives (already checked above -1e-10)
    // clipped to zero.
    let sqrt_diag = DMatrix::from_fn(4, 4, |r, c| {
        if r == c {
            Complex64::new(vals[r].max(0.0).sqrt(), 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let root = &vecs * sqrt_diag * vecs.adjoint();
    // (sy x sy) acts as index reversal with signs (-1, 1, 1, -1).
    let signs = [-1.0, 1.0, 1.0, -1.0];
    let yy = DMatrix::from_fn(4, 4, |r, c| {
        if r + c == 3 {
            Complex64::new(signs[r], 0.0)
        } else {
            Complex64::ZERO
        }
    });
    // With B = sqrt(rho) (sy x sy) sqrt(rho)*, the product B B^dagger equals
    // sqrt(rho) rho_tilde sqrt(rho), which shares its spectrum with
    // rho rho_tilde. The lambda_i are therefore the singular values of B;
    // taking them from an SVD avoids the square-root blowup of round-off in
    // near-zero eigenvalues.
    let b = &root * yy * root.map(|x| x.conj());
    let svd = b.svd(false, false);
    let mut lams: Vec<f64> = svd.singular_values.iter().copied().collect();
    lams.sort_by(|a, b| b.total_cmp(a));
    Ok((lams[0] - lams[1] - lams[2] - lams[3]).clamp(0.0, 1.0))
}
