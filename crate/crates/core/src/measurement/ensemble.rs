use super::pointer::{binary_outcome, pointer_measure, PointerParams};
use crate::dynamics::{precession_for_sweep, CouplingConfig};
use crate::error::{Error, Result};
use crate::qlinalg::{expectation, DensityMatrix, Ket, Operator};
use crate::rng::{run_trials, StreamTag};

/// False-alarm rate of the rotation detection test.
pub const DETECTION_ALPHA: f64 = 0.05;

/// Upper `1 − α` quantile of the standard normal for `α = 0.05`.
const Z_CRITICAL: f64 = 1.644_853_626_951_472_2;

/// Statistics of the N-spin precession test.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStatistics {
    pub spins: usize,
    pub phi: f64,
    /// Standard deviation of the total accumulated phase `Σᵢ δφᵢ`.
    pub delta_phi_total: f64,
    pub stderr: f64,
    /// Fraction of trials rejecting "no rotation" at level [`DETECTION_ALPHA`].
    pub detection_power: f64,
    /// Mean of the correlation statistic `Σᵢ sgn(q₁ᵢ)·q₂ᵢ / g`.
    pub mean_correlation: f64,
    pub trials: usize,
    pub seed: u64,
}

struct TrialSummary {
    statistic: f64,
    phase_mean: f64,
    phase_var: f64,
}

/// N spins prepared in `|x⟩`, each coupled to σ_x, precessed by `phi` about
/// z, then coupled to σ_y.
///
/// Per spin the phase accumulated while precessing is `(φ/2)σ_z`. The total
/// phase spread combines, across trials, the quantum variance of `Σ(φ/2)σ_zᵢ`
/// in each trial's post-measurement product state with the scatter of its
/// conditional mean (law of total variance).
///
/// Rotation detection uses the readout correlation
/// `T = Σᵢ sgn(q₁ᵢ)·q₂ᵢ`. Without rotation σ_y has zero mean on every
/// post-σ_x state, so `T` has mean 0 and variance `N(g² + Δ²)`; the test
/// rejects when `T > z_{1−α}·√(N(g² + Δ²))`.
pub fn ensemble_precession_test(
    spins: usize,
    phi: f64,
    pointer: &PointerParams,
    trials: usize,
    seed: u64,
) -> Result<EnsembleStatistics> {
    if spins == 0 {
        return Err(Error::Usage("ensemble needs at least one spin".into()));
    }
    if trials < 2 {
        return Err(Error::Usage("ensemble test needs at least two trials".into()));
    }
    if !phi.is_finite() {
        return Err(Error::Usage(format!("rotation angle must be finite, got {phi}")));
    }
    let cfg = CouplingConfig::default();
    let u = precession_for_sweep(cfg.sweep_for_rotation(phi)?, &cfg);
    let rho0 = DensityMatrix::from_ket(&Ket::plus_x())?;
    let (sx, sy, sz) = (Operator::sigma_x(), Operator::sigma_y(), Operator::sigma_z());
    let half = 0.5 * phi;
    let g = pointer.strength();
    let null_sd = (spins as f64 * (g * g + pointer.width().powi(2))).sqrt();
    let threshold = Z_CRITICAL * null_sd;

    let summaries: Result<Vec<TrialSummary>> = run_trials(trials, seed, StreamTag(1), |_, rng| {
        let mut statistic = 0.0;
        let mut phase_mean = 0.0;
        let mut phase_var = 0.0;
        for _ in 0..spins {
            let first = pointer_measure(&rho0, &sx, pointer, rng)?;
            let m = expectation(&sz, &first.post)?.re;
            phase_mean += half * m;
            phase_var += half * half * (1.0 - m * m).max(0.0);
            let rotated = first.post.evolve(&u)?;
            let second = pointer_measure(&rotated, &sy, pointer, rng)?;
            statistic += f64::from(binary_outcome(first.readout)) * second.readout;
        }
        Ok(TrialSummary {
            statistic,
            phase_mean,
            phase_var,
        })
    })
    .into_iter()
    .collect();
    let summaries = summaries?;

    let n = summaries.len() as f64;
    let mean_var = summaries.iter().map(|s| s.phase_var).sum::<f64>() / n;
    let mean_mu = summaries.iter().map(|s| s.phase_mean).sum::<f64>() / n;
    let var_mu = summaries
        .iter()
        .map(|s| (s.phase_mean - mean_mu).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    let total_var = mean_var + var_mu;
    let delta_phi_total = total_var.sqrt();

    let var_of_v = summaries
        .iter()
        .map(|s| (s.phase_var - mean_var).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    let se_total_var = (var_of_v / n + 2.0 * var_mu * var_mu / (n - 1.0)).sqrt();
    let stderr = if delta_phi_total > 0.0 {
        se_total_var / (2.0 * delta_phi_total)
    } else {
        0.0
    };

    let rejections = summaries.iter().filter(|s| s.statistic > threshold).count();
    let scale = if g > 0.0 { g } else { 1.0 };
    Ok(EnsembleStatistics {
        spins,
        phi,
        delta_phi_total,
        stderr,
        detection_power: rejections as f64 / n,
        mean_correlation: summaries.iter().map(|s| s.statistic).sum::<f64>() / n / scale,
        trials,
        seed,
    })
}
