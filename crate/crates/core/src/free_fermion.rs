//! Analytic free-fermion solution of the transverse XY chain: Bogoliubov
//! mode angles, the finite-N Berry-phase mode sum, its thermodynamic-limit
//! quadrature, and the phase-to-concurrence conversion.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::quad::{adaptive_simpson, QuadError};

#[derive(Debug, Error, PartialEq)]
pub enum FreeFermionError {
    #[error("mode sum requires odd n_sites >= 3, got {0}")]
    BadModeCount(usize),
    #[error("lambda must be finite and >= 0, got {0}")]
    BadLambda(f64),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// How a Berry phase was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMethod {
    ModeSum,
    Quadrature,
    WilsonLoop,
    Adiabatic,
}

/// A Berry phase together with the concurrence it encodes, C = |gamma|/2pi.
///
/// `concurrence` is stored unclipped; a value above 1 (possible for raw
/// extensive mode sums, where |gamma| > 2pi) sets `out_of_range` instead of
/// being silently truncated.
#[derive(Debug, Clone)]
pub struct PhaseReport {
    pub gamma: f64,
    pub method: PhaseMethod,
    pub concurrence: f64,
    pub out_of_range: bool,
    pub metadata: BTreeMap<String, f64>,
}

impl PhaseReport {
    pub fn new(gamma: f64, method: PhaseMethod, metadata: BTreeMap<String, f64>) -> Self {
        let concurrence = concurrence_from_phase(gamma);
        PhaseReport {
            gamma,
            method,
            concurrence,
            out_of_range: concurrence > 1.0,
            metadata,
        }
    }
}

/// C = |gamma| / 2pi. The caller decides what to do with values above 1;
/// `PhaseReport` flags them.
pub fn concurrence_from_phase(gamma: f64) -> f64 {
    gamma.abs() / (2.0 * std::f64::consts::PI)
}

/// Bogoliubov angle theta in [0, pi] with
/// cos theta = (1 + lambda cos phi)/sqrt(1 + lambda^2 + 2 lambda cos phi).
/// The removable singularity at lambda = 1, phi = pi returns pi/2 by
/// continuity.
pub fn bogoliubov_angle(lambda: f64, phi: f64) -> f64 {
    let c = phi.cos();
    let denom_sqr = 1.0 + lambda * lambda + 2.0 * lambda * c;
    if denom_sqr <= 1e-24 {
        return std::f64::consts::FRAC_PI_2;
    }
    let cos_theta = ((1.0 + lambda * c) / denom_sqr.sqrt()).clamp(-1.0, 1.0);
    cos_theta.acos()
}

/// Mode angles of an odd-length periodic chain: phi_k = 2 pi k / N and
/// theta_k = bogoliubov_angle(lambda, phi_k) for k = 1 .. (N-1)/2.
#[derive(Debug, Clone)]
pub struct ModeAngles {
    pub n_sites: usize,
    pub lambda: f64,
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
}

impl ModeAngles {
    pub fn new(n_sites: usize, lambda: f64) -> Result<Self, FreeFermionError> {
        if n_sites < 3 || n_sites.is_multiple_of(2) {
            return Err(FreeFermionError::BadModeCount(n_sites));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(FreeFermionError::BadLambda(lambda));
        }
        let modes = (n_sites - 1) / 2;
        let phis: Vec<f64> = (1..=modes)
            .map(|k| 2.0 * std::f64::consts::PI * k as f64 / n_sites as f64)
            .collect();
        let thetas = phis.iter().map(|&p| bogoliubov_angle(lambda, p)).collect();
        Ok(ModeAngles {
            n_sites,
            lambda,
            thetas,
            phis,
        })
    }

    pub fn modes(&self) -> usize {
        self.thetas.len()
    }
}

/// Raw Berry-phase mode sum gamma = sum_k pi (1 - cos theta_k) over the
/// positive-k modes. The sum is extensive; the per-mode mean
/// (metadata key "gamma_per_mode_mean") is the quantity with a finite
/// thermodynamic limit.
pub fn berry_phase_mode_sum(n_sites: usize, lambda: f64) -> Result<PhaseReport, FreeFermionError> {
    let angles = ModeAngles::new(n_sites, lambda)?;
    let gamma: f64 = angles
        .thetas
        .iter()
        .map(|t| std::f64::consts::PI * (1.0 - t.cos()))
        .sum();
    let modes = angles.modes() as f64;
    let mut metadata = BTreeMap::new();
    metadata.insert("n_sites".into(), n_sites as f64);
    metadata.insert("lambda".into(), lambda);
    metadata.insert("modes".into(), modes);
    metadata.insert("gamma_per_mode_mean".into(), gamma / modes);
    Ok(PhaseReport::new(gamma, PhaseMethod::ModeSum, metadata))
}

/// Thermodynamic-limit per-mode Berry phase
/// gamma = int_0^pi [1 - (1 + lambda cos phi)/sqrt(1 + lambda^2 + 2 lambda cos phi)] dphi.
pub fn berry_phase_thermo(lambda: f64, tol: f64) -> Result<PhaseReport, FreeFermionError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(FreeFermionError::BadLambda(lambda));
    }
    // At lambda = 1 the integrand is continuous up to phi = pi (value 1)
    // but its derivative diverges there; bogoliubov_angle already encodes
    // the continuity rule.
    let integrand = move |phi: f64| 1.0 - bogoliubov_angle(lambda, phi).cos();
    let gamma = adaptive_simpson(integrand, 0.0, std::f64::consts::PI, tol)?;
    let mut metadata = BTreeMap::new();
    metadata.insert("lambda".into(), lambda);
    metadata.insert("tol".into(), tol);
    Ok(PhaseReport::new(gamma, PhaseMethod::Quadrature, metadata))
}

/// Ground-state amplitudes of one Bogoliubov mode at rotation angle `phi`:
/// (cos(theta_k/2), -i e^{2 i phi} sin(theta_k/2)) on the
/// (paired vacuum, paired excitation) basis. Unit norm by construction.
pub fn analytic_mode_state(lambda: f64, phi_k: f64, phi: f64) -> (Complex64, Complex64) {
    let theta = bogoliubov_angle(lambda, phi_k);
    let first = Complex64::new((0.5 * theta).cos(), 0.0);
    let second = Complex64::new(0.0, -1.0)
        * Complex64::from_polar(1.0, 2.0 * phi)
        * (0.5 * theta).sin();
    (first, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angle_limits_and_oracles() {
        for phi in [0.0, 0.7, PI / 2.0, 2.5, PI] {
            assert_eq!(bogoliubov_angle(0.0, phi), 0.0);
        }
        // At lambda = 1 the angle closes to phi/2.
        for phi in [0.0, 0.3, PI / 2.0, 2.9] {
            assert!((bogoliubov_angle(1.0, phi) - 0.5 * phi).abs() < 1e-12);
        }
        assert!((bogoliubov_angle(1.0, PI / 2.0) - PI / 4.0).abs() < 1e-12);
        assert!((bogoliubov_angle(2.0, PI / 2.0) - 1.1071487177940904).abs() < 1e-12);
        // Removable singularity.
        assert_eq!(bogoliubov_angle(1.0, PI), PI / 2.0);
        // Range stays in [0, pi] even deep in the ordered phase.
        for phi in [0.0, 1.0, 2.0, PI] {
            let t = bogoliubov_angle(5.0, phi);
            assert!((0.0..=PI).contains(&t));
        }
    }

    #[test]
    fn mode_angles_layout() {
        let m = ModeAngles::new(9, 0.5).unwrap();
        assert_eq!(m.modes(), 4);
        for (k, phi) in m.phis.iter().enumerate() {
            assert!((phi - 2.0 * PI * (k as f64 + 1.0) / 9.0).abs() < 1e-15);
        }
        assert_eq!(ModeAngles::new(8, 0.5).unwrap_err(), FreeFermionError::BadModeCount(8));
        assert_eq!(ModeAngles::new(1, 0.5).unwrap_err(), FreeFermionError::BadModeCount(1));
        assert!(ModeAngles::new(9, -1.0).is_err());
    }

    #[test]
    fn mode_sum_small_cases() {
        let r = berry_phase_mode_sum(7, 0.0).unwrap();
        assert_eq!(r.gamma, 0.0);
        assert_eq!(r.concurrence, 0.0);
        assert!(!r.out_of_range);

        // N = 3, lambda = 1: a single mode at phi_1 = 2pi/3, theta_1 = pi/3.
        let r = berry_phase_mode_sum(3, 1.0).unwrap();
        assert!((r.gamma - PI / 2.0).abs() < 1e-12);
        assert_eq!(r.metadata["modes"], 1.0);
    }

    #[test]
    fn mode_sum_mean_approaches_critical_value() {
        let r = berry_phase_mode_sum(1001, 1.0).unwrap();
        let mean = r.metadata["gamma_per_mode_mean"];
        assert!((mean - (PI - 2.0)).abs() < 5e-3);
        // The raw sum is extensive and far outside one winding.
        assert!(r.out_of_range);
        assert!(r.concurrence > 1.0);
    }

    #[test]
    fn thermo_oracle_values() {
        let r = berry_phase_thermo(0.0, 1e-10).unwrap();
        assert_eq!(r.gamma, 0.0);

        let r = berry_phase_thermo(1.0, 1e-10).unwrap();
        assert!((r.gamma - (PI - 2.0)).abs() < 1e-9);
        assert!((r.concurrence - 0.181690113816209).abs() < 1e-9);

        // Pinned by an independent high-order quadrature oracle.
        let r = berry_phase_thermo(0.5, 1e-10).unwrap();
        assert!((r.gamma - 0.206668234910939).abs() < 1e-9);

        let r = berry_phase_thermo(1000.0, 1e-10).unwrap();
        assert!(r.gamma <= PI && r.gamma >= PI - 0.01);

        assert!(berry_phase_thermo(-0.1, 1e-10).is_err());
        assert!(berry_phase_thermo(f64::NAN, 1e-10).is_err());
    }

    #[test]
    fn concurrence_conversion() {
        assert_eq!(concurrence_from_phase(0.0), 0.0);
        assert!((concurrence_from_phase(-2.0 * PI) - 1.0).abs() < 1e-15);
        assert!((concurrence_from_phase(PI - 2.0) - 0.181690113816209).abs() < 1e-12);
        let report = PhaseReport::new(3.0 * PI, PhaseMethod::WilsonLoop, BTreeMap::new());
        assert!(report.out_of_range);
        assert!((report.concurrence - 1.5).abs() < 1e-15);
    }

    #[test]
    fn mode_state_examples() {
        let inv = 1.0 / 2.0_f64.sqrt();
        for phi in [0.0, 0.4, 1.3] {
            let (a, b) = analytic_mode_state(0.0, 2.0, phi);
            assert!((a - Complex64::ONE).norm() < 1e-15);
            assert!(b.norm() < 1e-15);
        }
        // theta = pi/2 via the critical angle at phi_k = pi.
        let (a, b) = analytic_mode_state(1.0, PI, 0.0);
        assert!((a - Complex64::new(inv, 0.0)).norm() < 1e-12);
        assert!((b - Complex64::new(0.0, -inv)).norm() < 1e-12);

        let (a, b) = analytic_mode_state(1.0, PI / 2.0, PI / 4.0);
        assert!((a - Complex64::new((PI / 8.0).cos(), 0.0)).norm() < 1e-12);
        assert!((b - Complex64::new((PI / 8.0).sin(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn mode_state_is_normalized() {
        for lambda in [0.2, 1.0, 3.7] {
            for phi_k in [0.1, 1.0, 2.0, PI] {
                for phi in [0.0, 0.8, PI] {
                    let (a, b) = analytic_mode_state(lambda, phi_k, phi);
                    assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn cos_theta_monotone_from_critical_coupling() {
        // d cos(theta)/d phi has the sign of -(lambda^2 + lambda cos phi)
        // sin phi, so the profile is nonincreasing exactly when lambda >= 1.
        for lambda in [1.0, 2.0, 5.0] {
            let mut prev = f64::INFINITY;
            for step in 0..=400 {
                let phi = PI * step as f64 / 400.0;
                let c = bogoliubov_angle(lambda, phi).cos();
                assert!(c <= prev + 1e-12, "lambda {lambda} phi {phi}");
                prev = c;
            }
        }
    }

    #[test]
    fn cos_theta_dips_below_critical_coupling() {
        // For lambda < 1 the profile leaves 1, reaches its minimum
        // sqrt(1 - lambda^2) where cos phi = -lambda, and returns to 1 at
        // phi = pi; it is not monotone there.
        for lambda in [0.3_f64, 0.8] {
            assert!((bogoliubov_angle(lambda, 0.0).cos() - 1.0).abs() < 1e-12);
            assert!((bogoliubov_angle(lambda, PI).cos() - 1.0).abs() < 1e-12);
            let phi_min = (-lambda).acos();
            let expect_min = (1.0 - lambda * lambda).sqrt();
            assert!((bogoliubov_angle(lambda, phi_min).cos() - expect_min).abs() < 1e-12);
            for step in 0..=400 {
                let phi = PI * step as f64 / 400.0;
                let c = bogoliubov_angle(lambda, phi).cos();
                assert!(c >= expect_min - 1e-12 && c <= 1.0 + 1e-12);
            }
        }
    }
}
