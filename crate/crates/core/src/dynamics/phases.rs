use super::{CouplingConfig, Trajectory};
use crate::error::{Error, Result};

/// Trapezoidal integral of piecewise-linear `(t, y)` samples; exact for
/// piecewise-linear `y`.
pub(crate) fn trapezoid(samples: &[(f64, f64)], what: &str) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Usage(format!("{what} needs at least two samples")));
    }
    if samples.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
        return Err(Error::Usage(format!("{what} has non-finite samples")));
    }
    let mut total = 0.0;
    for w in samples.windows(2) {
        let (t0, y0) = w[0];
        let (t1, y1) = w[1];
        if t1 <= t0 {
            return Err(Error::Usage(format!(
                "{what} sample times must increase ({t0} then {t1})"
            )));
        }
        total += 0.5 * (y0 + y1) * (t1 - t0);
    }
    Ok(total)
}

/// Phase `(μ/ħ)∫B(t)dt` from a homogeneous time-dependent field.
pub fn scalar_ab_phase(field_samples: &[(f64, f64)], cfg: &CouplingConfig) -> Result<f64> {
    Ok(cfg.mu() / cfg.hbar() * trapezoid(field_samples, "field series")?)
}

/// Spin-independent phase `(2ξ/ħm)∫dt/r²`.
///
/// On a segment where `r` runs linearly from `r₀` to `r₁` over `τ`,
/// `∫dt/r² = τ/(r₀r₁)`.
pub fn dynamical_phase(traj: &Trajectory, cfg: &CouplingConfig) -> f64 {
    let integral: f64 = traj
        .samples()
        .windows(2)
        .map(|w| (w[1].t - w[0].t) / (w[0].r * w[1].r))
        .sum();
    2.0 * cfg.xi() / (cfg.hbar() * cfg.mass()) * integral
}
