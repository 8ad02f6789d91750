//! Two spins driven by a conically rotating field: closed-form Berry
//! phases, entanglement measures, and a numerical adiabatic evolution that
//! recovers the geometric phase per branch.

use num_complex::Complex64;
use thiserror::Error;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error, PartialEq)]
pub enum ToyError {
    #[error("theta = {0} outside [0, pi]")]
    BadTheta(f64),
    #[error("omega0 and field_scale must be positive and finite, got {0}")]
    BadRate(f64),
    #[error("at least 100 steps per period are required, got {0}")]
    TooFewSteps(usize),
}

/// Drive geometry and integration controls. `field_scale` is the energy
/// splitting of each spin (hbar = 1); only omega0/field_scale matters
/// physically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyParams {
    /// Tilt of the field cone from the z axis, in [0, pi].
    pub theta: f64,
    pub omega0: f64,
    pub field_scale: f64,
    /// Time steps per drive period.
    pub steps: usize,
}

impl ToyParams {
    pub fn new(theta: f64, omega0: f64, field_scale: f64, steps: usize) -> Result<Self, ToyError> {
        let params = ToyParams {
            theta,
            omega0,
            field_scale,
            steps,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ToyError> {
        if !(0.0..=std::f64::consts::PI).contains(&self.theta) {
            return Err(ToyError::BadTheta(self.theta));
        }
        for rate in [self.omega0, self.field_scale] {
            if !rate.is_finite() || rate <= 0.0 {
                return Err(ToyError::BadRate(rate));
            }
        }
        if self.steps < 100 {
            return Err(ToyError::TooFewSteps(self.steps));
        }
        Ok(())
    }

    /// Drive-to-splitting ratio; above 1 the run is flagged non-adiabatic.
    pub fn adiabatic_ratio(&self) -> f64 {
        self.omega0 / self.field_scale
    }
}

/// Numerically recovered geometric phases, windowed into (-2 pi, 0].
#[derive(Debug, Clone, Copy)]
pub struct AdiabaticPhases {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Worst squared overlap with the opposite instantaneous eigenstate at
    /// the end of a period, per branch.
    pub leakage_plus: f64,
    pub leakage_minus: f64,
    /// Worst |norm - 1| of any propagated state.
    pub norm_drift: f64,
    /// Set when omega0/field_scale > 1.
    pub adiabaticity_warning: bool,
    /// Set when leakage exceeds 10 (omega0/field_scale)^2.
    pub leakage_alarm: bool,
}

/// Field direction (sin t cos, sin t sin, cos) at angle omega0 t around the
/// cone of tilt theta.
pub fn n_vector(theta: f64, t: f64, omega0: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    let phase = omega0 * t;
    [s * phase.cos(), s * phase.sin(), c]
}

/// Instantaneous eigenstates of n . sigma: the aligned state
/// (cos(theta/2), sin(theta/2) e^{i omega0 t}) and its orthonormal
/// companion (sin(theta/2), -cos(theta/2) e^{i omega0 t}).
pub fn instantaneous_eigenstates(
    theta: f64,
    t: f64,
    omega0: f64,
) -> ((Complex64, Complex64), (Complex64, Complex64)) {
    let half = 0.5 * theta;
    let turn = Complex64::from_polar(1.0, omega0 * t);
    let up = (Complex64::new(half.cos(), 0.0), turn * half.sin());
    let down = (Complex64::new(half.sin(), 0.0), -turn * half.cos());
    (up, down)
}

/// Berry phases of the aligned and anti-aligned branches after one drive
/// period: gamma_pm = -pi (1 -+ cos theta), half the enclosed solid angle.
pub fn analytic_berry_phases(theta: f64) -> (f64, f64) {
    let c = theta.cos();
    (
        -std::f64::consts::PI * (1.0 - c),
        -std::f64::consts::PI * (1.0 + c),
    )
}

/// Entanglement measure factors mu_pm = -(1 -+ cos theta)/2; their absolute
/// values sum to 1.
pub fn mu_factors(theta: f64) -> (f64, f64) {
    let c = theta.cos();
    (-(1.0 - c) / 2.0, -(1.0 + c) / 2.0)
}

/// Amplitude magnitudes (|a|, |b|) = sqrt(2) (cos^2(theta/4), sin^2(theta/4)).
/// Reported exactly in this form, which is not normalized except at
/// theta = pi.
pub fn amplitude_profile(theta: f64) -> (f64, f64) {
    let quarter = 0.25 * theta;
    let root2 = 2.0_f64.sqrt();
    (
        root2 * quarter.cos().powi(2),
        root2 * quarter.sin().powi(2),
    )
}

/// Concurrence of the two-spin state as a function of the cone tilt:
/// C = sin^2(theta/2) = |mu_plus| = |gamma_plus| / 2 pi.
pub fn concurrence_theta(theta: f64) -> f64 {
    (0.5 * theta).sin().powi(2)
}

/// Maps a phase into the window (-2 pi, 0]; -2 pi itself reports as 0.
fn window_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TWO_PI);
    if y == 0.0 {
        0.0
    } else {
        y - TWO_PI
    }
}

fn wrap_to_branch(x: f64) -> f64 {
    x.sin().atan2(x.cos())
}

fn inner(a: &(Complex64, Complex64), b: &(Complex64, Complex64)) -> Complex64 {
    a.0.conj() * b.0 + a.1.conj() * b.1
}

/// One drive period of i d psi/dt = (field_scale/2) n . sigma psi, stepped
/// with the exact 2x2 exponential of the midpoint Hamiltonian. A negative
/// `omega0` traverses the cone backwards.
fn propagate_period(
    theta: f64,
    omega0: f64,
    field_scale: f64,
    steps: usize,
    start: (Complex64, Complex64),
) -> (Complex64, Complex64) {
    let tau = TWO_PI / omega0.abs();
    let dt = tau / steps as f64;
    // exp(-i H dt) = cos(a) I - i sin(a) n . sigma with a = field_scale dt / 2,
    // because (n . sigma)^2 = I.
    let (sin_a, cos_a) = (0.5 * field_scale * dt).sin_cos();
    let rot = Complex64::new(0.0, -sin_a);
    let (mut p0, mut p1) = start;
    for step in 0..steps {
        let t_mid = (step as f64 + 0.5) * dt;
        let n = n_vector(theta, t_mid, omega0);
        let off = Complex64::new(n[0], -n[1]);
        let ns0 = p0 * n[2] + p1 * off;
        let ns1 = p0 * off.conj() - p1 * n[2];
        (p0, p1) = (cos_a * p0 + rot * ns0, cos_a * p1 + rot * ns1);
    }
    (p0, p1)
}

/// Geometric phase of each branch after one period, from the total phase
/// Arg<psi(0)|psi(tau)> minus the dynamical part -+ (field_scale/2) tau.
///
/// The first-order non-adiabatic phase bias is odd under reversal of the
/// drive direction, so each branch is propagated forwards and backwards;
/// half the wrapped sum of the two window residues estimates the bias,
/// which is then removed. The remainder converges quadratically in
/// omega0/field_scale.
pub fn adiabatic_geometric_phase(params: &ToyParams) -> Result<AdiabaticPhases, ToyError> {
    params.validate()?;
    let ToyParams {
        theta,
        omega0,
        field_scale,
        steps,
    } = *params;
    let tau = TWO_PI / omega0;
    let (ref_up, ref_down) = instantaneous_eigenstates(theta, 0.0, omega0);

    let mut norm_drift = 0.0f64;
    let mut run_branch = |start: &(Complex64, Complex64),
                          other: &(Complex64, Complex64),
                          energy_sign: f64|
     -> (f64, f64) {
        let nu = -energy_sign * 0.5 * field_scale * tau;
        let mut windowed = [0.0; 2];
        let mut leak = 0.0f64;
        for (slot, drive) in [omega0, -omega0].into_iter().enumerate() {
            let psi = propagate_period(theta, drive, field_scale, steps, *start);
            let norm = (psi.0.norm_sqr() + psi.1.norm_sqr()).sqrt();
            norm_drift = norm_drift.max((norm - 1.0).abs());
            windowed[slot] = window_phase(inner(start, &psi).arg() - nu);
            leak = leak.max(inner(other, &psi).norm_sqr());
        }
        let bias = 0.5 * wrap_to_branch(windowed[0] + windowed[1]);
        (window_phase(windowed[0] - bias), leak)
    };

    let (gamma_plus, leakage_plus) = run_branch(&ref_up, &ref_down, 1.0);
    let (gamma_minus, leakage_minus) = run_branch(&ref_down, &ref_up, -1.0);

    let ratio = params.adiabatic_ratio();
    Ok(AdiabaticPhases {
        gamma_plus,
        gamma_minus,
        leakage_plus,
        leakage_minus,
        norm_drift,
        adiabaticity_warning: ratio > 1.0,
        leakage_alarm: leakage_plus.max(leakage_minus) > 10.0 * ratio * ratio,
    })
}
