//! Adaptive Simpson quadrature for the smooth one-dimensional integrals
//! that appear in the thermodynamic-limit phase formulas.

use thiserror::Error;

/// Subdivision budget; hitting it means the integrand is not resolvable.
pub const MAX_INTERVALS: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteSample { x: f64 },
    #[error("subdivision budget of {0} intervals exhausted before reaching tolerance")]
    BudgetExhausted(usize),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
}

fn sample<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, QuadError> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadError::NonFiniteSample { x })
    }
}

/// Integrates `f` over [a, b] to absolute tolerance `tol` by recursive
/// interval bisection with Richardson extrapolation of the Simpson rule.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, QuadError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(QuadError::BadTolerance(tol));
    }
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let simpson = |fa: f64, fm: f64, fb: f64, h: f64| h / 6.0 * (fa + 4.0 * fm + fb);

    struct Segment {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
    }

    let fa = sample(&f, lo)?;
    let fb = sample(&f, hi)?;
    let mid = 0.5 * (lo + hi);
    let fm = sample(&f, mid)?;
    let mut stack = vec![Segment {
        a: lo,
        b: hi,
        fa,
        fm,
        fb,
        whole: simpson(fa, fm, fb, hi - lo),
        tol,
    }];
    let mut total = 0.0;
    let mut intervals = 1usize;
    while let Some(seg) = stack.pop() {
        let m = 0.5 * (seg.a + seg.b);
        let lm = 0.5 * (seg.a + m);
        let rm = 0.5 * (m + seg.b);
        let flm = sample(&f, lm)?;
        let frm = sample(&f, rm)?;
        let left = simpson(seg.fa, flm, seg.fm, m - seg.a);
        let right = simpson(seg.fm, frm, seg.fb, seg.b - m);
        let halves = left + right;
        // One bisection gains a factor 16 in the Simpson error, so the
        // extrapolated correction is (halves - whole)/15.
        if (halves - seg.whole).abs() <= 15.0 * seg.tol {
            total += halves + (halves - seg.whole) / 15.0;
            continue;
        }
        intervals += 1;
        if intervals > MAX_INTERVALS {
            return Err(QuadError::BudgetExhausted(MAX_INTERVALS));
        }
        stack.push(Segment {
            a: seg.a,
            b: m,
            fa: seg.fa,
            fm: flm,
            fb: seg.fm,
            whole: left,
            tol: 0.5 * seg.tol,
        });
        stack.push(Segment {
            a: m,
            b: seg.b,
            fa: seg.fm,
            fm: frm,
            fb: seg.fb,
            whole: right,
            tol: 0.5 * seg.tol,
        });
    }
    Ok(sign * total)
}
