//! Ground-state solvers: Lanczos with full reorthogonalization for
//! matrix-free Hermitian operators, and a dense Hermitian solver for the
//! small matrices used by the entanglement routines and test oracles.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest matrix-free problem dimension (2^20).
pub const MAX_DIM: usize = 1 << 20;
/// Largest matrix accepted by the dense solver.
pub const MAX_DENSE: usize = 64;

const MAX_KRYLOV: usize = 200;
const MAX_RESTARTS: usize = 5;
const CHECK_EVERY: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum EigenError {
    #[error("dimension {0} exceeds the supported maximum of 2^20")]
    DimTooLarge(usize),
    #[error("problem dimension must be at least {needed}, got {dim}")]
    DimTooSmall { dim: usize, needed: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("no convergence after {restarts} restarts; best residual {best_residual:.3e}")]
    NotConverged { restarts: usize, best_residual: f64 },
    #[error("start vector has negligible norm outside the deflated subspace")]
    DegenerateStart,
    #[error("tridiagonal QL iteration stalled")]
    TridiagStalled,
    #[error("matrix must be square, got {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dense solver accepts at most {MAX_DENSE} x {MAX_DENSE}, got {0}")]
    DenseTooLarge(usize),
    #[error("matrix deviates from Hermitian by {0:.3e}, beyond 1e-10")]
    NotHermitian(f64),
}

/// Converged lowest eigenpair of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub energy: f64,
    pub vector: Vec<Complex64>,
    /// Total Lanczos steps spent, summed over restarts.
    pub iterations: usize,
    /// Explicitly computed ||H v - E v||.
    pub residual_norm: f64,
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

/// Removes the components of `v` along each unit vector in `frame`.
fn project_out(v: &mut [Complex64], frame: &[Vec<Complex64>]) {
    for u in frame {
        let c = dot(u, v);
        for (vi, ui) in v.iter_mut().zip(u) {
            *vi -= c * ui;
        }
    }
}

struct Sweep {
    energy: f64,
    vector: Vec<Complex64>,
    residual: f64,
    steps: usize,
    converged: bool,
}

/// One restart cycle: grows a Krylov basis from `start` until the Ritz
/// residual passes `tol`, the basis hits its cap, or the space closes.
fn lanczos_sweep<F>(
    apply: &F,
    dim: usize,
    tol: f64,
    start: Vec<Complex64>,
    deflate: &[Vec<Complex64>],
) -> Result<Sweep, EigenError>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let max_steps = MAX_KRYLOV.min(dim - deflate.len());
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(max_steps);
    let mut alphas: Vec<f64> = Vec::with_capacity(max_steps);
    let mut betas: Vec<f64> = Vec::with_capacity(max_steps);
    let mut v = start;
    let mut w = vec![Complex64::ZERO; dim];
    let mut best: Option<Sweep> = None;
    let mut scale = 0.0f64;

    // Assembles the Ritz vector for the lowest tridiagonal eigenpair and
    // measures its true residual, projected off the deflated subspace.
    let assess = |basis: &[Vec<Complex64>],
                  alphas: &[f64],
                  betas: &[f64],
                  steps: usize|
     -> Result<(Sweep, f64), EigenError> {
        let k = alphas.len();
        let (_, vecs) = tridiag_eigh(alphas, &betas[..k - 1])?;
        let weights = &vecs[0];
        let mut y = vec![Complex64::ZERO; dim];
        for (weight, base) in weights.iter().zip(basis) {
            for (yi, bi) in y.iter_mut().zip(base) {
                *yi += weight * bi;
            }
        }
        project_out(&mut y, deflate);
        let n = norm(&y);
        if n < 1e-8 {
            return Err(EigenError::DegenerateStart);
        }
        for yi in &mut y {
            *yi /= n;
        }
        let mut hy = vec![Complex64::ZERO; dim];
        apply(&y, &mut hy);
        let energy = dot(&y, &hy).re;
        for (hi, yi) in hy.iter_mut().zip(&y) {
            *hi -= energy * yi;
        }
        project_out(&mut hy, deflate);
        let residual = norm(&hy);
        let tail = weights[k - 1].abs();
        Ok((
            Sweep {
                energy,
                vector: y,
                residual,
                steps,
                converged: residual <= tol,
            },
            tail,
        ))
    };

    for j in 0..max_steps {
        apply(&v, &mut w);
        let alpha = dot(&v, &w).re;
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= alpha * vi;
        }
        if j > 0 {
            let beta_prev = betas[j - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= beta_prev * vi;
            }
        }
        basis.push(v);
        alphas.push(alpha);
        // Two full reorthogonalization passes keep the basis orthonormal to
        // machine precision, which rules out ghost copies of converged
        // eigenvalues.
        for _ in 0..2 {
            project_out(&mut w, deflate);
            project_out(&mut w, &basis);
        }
        let beta = norm(&w);
        betas.push(beta);
        scale = scale.max(alpha.abs()).max(beta);

        let breakdown = beta <= 1e-13 * scale.max(1.0);
        let last = j + 1 == max_steps;
        if breakdown || last || (j + 1) % CHECK_EVERY == 0 {
            let (sweep, tail) = assess(&basis, &alphas, &betas, j + 1)?;
            let plausible = breakdown || last || beta * tail <= 0.5 * tol;
            let better = best.as_ref().is_none_or(|b| sweep.residual < b.residual);
            if better {
                best = Some(sweep);
            }
            let done = best.as_ref().is_some_and(|b| b.converged);
            if (plausible && done) || breakdown {
                return Ok(best.unwrap());
            }
        }
        v = w.iter().map(|wi| wi / beta).collect();
    }
    match best {
        Some(sweep) => Ok(sweep),
        None => {
            let (sweep, _) = assess(&basis, &alphas, &betas, max_steps)?;
            Ok(sweep)
        }
    }
}

fn solve<F>(
    apply: &F,
    dim: usize,
    tol: f64,
    seed: u64,
    start: Option<&[Complex64]>,
    deflate: &[Vec<Complex64>],
) -> Result<GroundStateResult, EigenError>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    if dim > MAX_DIM {
        return Err(EigenError::DimTooLarge(dim));
    }
    if dim < deflate.len() + 1 {
        return Err(EigenError::DimTooSmall {
            dim,
            needed: deflate.len() + 1,
        });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(EigenError::BadTolerance(tol));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prepare = |raw: Vec<Complex64>| -> Option<Vec<Complex64>> {
        let mut v = raw;
        for _ in 0..2 {
            project_out(&mut v, deflate);
        }
        let n = norm(&v);
        if n < 1e-10 {
            return None;
        }
        for vi in &mut v {
            *vi /= n;
        }
        Some(v)
    };

    let mut current = match start {
        Some(s) if s.len() == dim => prepare(s.to_vec()),
        _ => None,
    };
    let mut iterations = 0usize;
    let mut best_residual = f64::INFINITY;
    let mut last_residual = f64::INFINITY;
    let mut best: Option<GroundStateResult> = None;

    for _restart in 0..=MAX_RESTARTS {
        let start_vec = match current.take() {
            Some(v) => v,
            None => {
                let mut v = None;
                for _ in 0..8 {
                    v = prepare(random_vector(&mut rng, dim));
                    if v.is_some() {
                        break;
                    }
                }
                v.ok_or(EigenError::DegenerateStart)?
            }
        };
        let sweep = lanczos_sweep(apply, dim, tol, start_vec, deflate)?;
        iterations += sweep.steps;
        if sweep.residual < best_residual {
            best_residual = sweep.residual;
            best = Some(GroundStateResult {
                energy: sweep.energy,
                vector: sweep.vector.clone(),
                iterations,
                residual_norm: sweep.residual,
            });
        }
        if sweep.converged {
            let mut result = best.unwrap();
            result.iterations = iterations;
            return Ok(result);
        }
        // Warm-restart from the Ritz vector while it keeps improving; once
        // progress stalls, fall back to a fresh deterministic random start.
        if sweep.residual < 0.5 * last_residual {
            current = Some(sweep.vector);
        }
        last_residual = sweep.residual;
    }
    Err(EigenError::NotConverged {
        restarts: MAX_RESTARTS,
        best_residual,
    })
}

/// Lowest eigenpair of the Hermitian operator `apply` on a `dim`-dimensional
/// space. Deterministic for a fixed `seed`.
pub fn ground_state<F>(
    apply: F,
    dim: usize,
    tol: f64,
    seed: u64,
) -> Result<GroundStateResult, EigenError>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    solve(&apply, dim, tol, seed, None, &[])
}

/// Same as `ground_state` but seeds the first Krylov cycle from `start`,
/// which lets callers walk a parameter path without losing continuity.
pub fn ground_state_with_start<F>(
    apply: F,
    dim: usize,
    tol: f64,
    seed: u64,
    start: &[Complex64],
) -> Result<GroundStateResult, EigenError>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    solve(&apply, dim, tol, seed, Some(start), &[])
}

/// E_1 - E_0, computed by a second solve deflated against the ground vector.
/// A deflated solve sees degenerate partners, so a (near-)degenerate ground
/// space reports a (near-)zero gap.
pub fn spectral_gap<F>(apply: F, dim: usize, tol: f64, seed: u64) -> Result<f64, EigenError>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let ground = solve(&apply, dim, tol, seed, None, &[])?;
    let energy0 = ground.energy;
    let second = solve(&apply, dim, tol, seed.wrapping_add(1), None, &[ground.vector])?;
    Ok((second.energy - energy0).max(0.0))
}

/// Eigen decomposition of a real symmetric tridiagonal matrix by the
/// implicit-shift QL method. Returns eigenvalues ascending, each paired with
/// its eigenvector in the returned row order.
fn tridiag_eigh(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>), EigenError> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|c| {
            let mut col = vec![0.0; n];
            col[c] = 1.0;
            col
        })
        .collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(EigenError::TridiagStalled);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut early = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[i + 1][k];
                    z[i + 1][k] = s * z[i][k] + c * f;
                    z[i][k] = c * z[i][k] - s * f;
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let vals = order.iter().map(|&i| d[i]).collect();
    let vecs = order.iter().map(|&i| std::mem::take(&mut z[i])).collect();
    Ok((vals, vecs))
}

/// Eigen decomposition of a small Hermitian matrix: eigenvalues ascending
/// and the matching orthonormal eigenvector columns.
pub fn dense_eigh(matrix: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>), EigenError> {
    if matrix.nrows() != matrix.ncols() {
        return Err(EigenError::NotSquare {
            rows: matrix.nrows(),
            cols: matrix.ncols(),
        });
    }
    let n = matrix.nrows();
    if n == 0 {
        return Err(EigenError::DimTooSmall { dim: 0, needed: 1 });
    }
    if n > MAX_DENSE {
        return Err(EigenError::DenseTooLarge(n));
    }
    let adjoint = matrix.adjoint();
    let deviation = (matrix - &adjoint).norm();
    if deviation > 1e-10 {
        return Err(EigenError::NotHermitian(deviation));
    }
    // Symmetrize defensively so roundoff-level asymmetry cannot leak into
    // complex eigenvalues downstream.
    let sym = (matrix + adjoint).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}
