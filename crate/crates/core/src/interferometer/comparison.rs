use std::f64::consts::{FRAC_PI_2, PI};

use super::{InterferenceReport, TwoPathSetup};
use crate::dynamics::{CouplingConfig, Trajectory};
use crate::error::{Error, Result};
use crate::measurement::{
    histogram, measured_two_path, pair_index, simulate_two_path_trial, total_variation, Coupling,
    PointerParams,
};
use crate::qlinalg::{Ket, Operator};
use crate::rng::{run_trials, StreamTag};

/// `C_π` outcome-pair frequencies `(+,+), (+,−), (−,+), (−,−)` of two setups.
#[derive(Clone, Debug, PartialEq)]
pub struct CpiStatistics {
    pub distribution_a: [f64; 4],
    pub distribution_b: [f64; 4],
    pub tv_distance: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Winding-induced against engineered ±π/2 phases.
#[derive(Clone, Debug, PartialEq)]
pub struct TopologyComparison {
    pub relative_phase_a: f64,
    pub relative_phase_b: f64,
    /// `None` when the pointer is decoupled.
    pub statistics: Option<CpiStatistics>,
    /// Visibility after the non-selective `C_π` measurements.
    pub visibility_after_a: f64,
    pub visibility_after_b: f64,
}

/// Setup A: opposite half-precession arms. Setup B: both arms follow the
/// same half-precession path and carry an extra `+π/2` phase.
pub fn comparison_setups(cfg: &CouplingConfig) -> Result<(TwoPathSetup, TwoPathSetup)> {
    let sweep = cfg.sweep_for_rotation(PI)?;
    let cw = Trajectory::arc(0.0, 1.0, 0.0, sweep, 1.0)?;
    let ccw = Trajectory::arc(0.0, 1.0, 0.0, -sweep, 1.0)?;
    let a = TwoPathSetup::new(cw.clone(), ccw, Ket::spin_up(), *cfg)?;
    let b = TwoPathSetup::new(cw.clone(), cw, Ket::spin_up(), *cfg)?
        .with_extra_phases(FRAC_PI_2, FRAC_PI_2);
    Ok((a, b))
}

fn c_pi_couplings(setup: &TwoPathSetup) -> Vec<Coupling> {
    [setup.start_time(), setup.end_time()]
        .into_iter()
        .map(|time| Coupling {
            time,
            observable: Operator::sigma_x(),
        })
        .collect()
}

fn c_pi_distribution(
    setup: &TwoPathSetup,
    pointer: &PointerParams,
    trials: usize,
    seed: u64,
    tag: StreamTag,
) -> Result<[f64; 4]> {
    let couplings = c_pi_couplings(setup);
    let pairs: Result<Vec<usize>> = run_trials(trials, seed, tag, |_, rng| {
        let (q, _) = simulate_two_path_trial(setup, &couplings, pointer, rng)?;
        Ok(pair_index(q[0], q[1]))
    })
    .into_iter()
    .collect();
    Ok(histogram(pairs?.into_iter()))
}

fn phase_of(setup: &TwoPathSetup) -> Result<f64> {
    InterferenceReport::from_joint(super::run_two_path(setup)?)?
        .relative_phase
        .ok_or_else(|| Error::Numerical("comparison setup lost its interference".into()))
}

/// Runs the `C_π` protocol on both setups with a σ_z = +1 spin.
pub fn topological_vs_uniform(
    cfg: &CouplingConfig,
    pointer: &PointerParams,
    trials: usize,
    seed: u64,
) -> Result<TopologyComparison> {
    let (a, b) = comparison_setups(cfg)?;
    let relative_phase_a = phase_of(&a)?;
    let relative_phase_b = phase_of(&b)?;
    let after = |s: &TwoPathSetup| -> Result<f64> {
        Ok(InterferenceReport::from_joint(measured_two_path(s, &c_pi_couplings(s), pointer)?)?.visibility)
    };
    let statistics = if pointer.strength() > 0.0 && trials > 0 {
        let distribution_a = c_pi_distribution(&a, pointer, trials, seed, StreamTag(6))?;
        let distribution_b = c_pi_distribution(&b, pointer, trials, seed, StreamTag(7))?;
        Some(CpiStatistics {
            tv_distance: total_variation(&distribution_a, &distribution_b),
            distribution_a,
            distribution_b,
            trials,
            seed,
        })
    } else {
        None
    };
    Ok(TopologyComparison {
        relative_phase_a,
        relative_phase_b,
        statistics,
        visibility_after_a: after(&a)?,
        visibility_after_b: after(&b)?,
    })
}
