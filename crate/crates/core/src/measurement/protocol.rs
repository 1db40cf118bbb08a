use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use super::pointer::{binary_outcome, eigenprojectors, pointer_measure, PointerParams};
use crate::dynamics::{precession_between, CouplingConfig, Trajectory};
use crate::error::{Error, Result};
use crate::qlinalg::{expectation, DensityMatrix, Ket, Operator};
use crate::rng::{mean_stderr, run_trials, StreamTag};

/// A pointer coupling to `observable` at `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub time: f64,
    pub observable: Operator,
}

/// Repeated pointer couplings to a single spin moving along `trajectory`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub trajectory: Trajectory,
    pub coupling: CouplingConfig,
    pub spin_in: Ket,
    pub couplings: Vec<Coupling>,
    pub pointer: PointerParams,
    pub trials: usize,
    pub seed: u64,
}

impl ProtocolConfig {
    /// The `C_{π/2}` check: σ_x at the start of the path and σ_y at its end.
    pub fn precession_check(
        trajectory: Trajectory,
        coupling: CouplingConfig,
        spin_in: Ket,
        pointer: PointerParams,
        trials: usize,
        seed: u64,
    ) -> Self {
        let couplings = vec![
            Coupling {
                time: trajectory.start_time(),
                observable: Operator::sigma_x(),
            },
            Coupling {
                time: trajectory.end_time(),
                observable: Operator::sigma_y(),
            },
        ];
        Self {
            trajectory,
            coupling,
            spin_in,
            couplings,
            pointer,
            trials,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Usage("trials must be positive".into()));
        }
        if self.spin_in.dim() != 2 || !self.spin_in.is_normalized() {
            return Err(Error::Usage("spin_in must be a normalized qubit ket".into()));
        }
        let mut last = self.trajectory.start_time();
        for c in &self.couplings {
            if !self.trajectory.contains(c.time) {
                return Err(Error::Usage(format!(
                    "coupling time {} outside trajectory span",
                    c.time
                )));
            }
            if c.time < last {
                return Err(Error::Usage("coupling times must be increasing".into()));
            }
            last = c.time;
            if c.observable.dim() != 2 {
                return Err(Error::Dimension("coupled observables must be 2x2".into()));
            }
            eigenprojectors(&c.observable)?;
        }
        Ok(())
    }

    /// Precession angle between the first and last coupling.
    pub fn rotation_between_couplings(&self) -> Result<f64> {
        let (first, last) = match (self.couplings.first(), self.couplings.last()) {
            (Some(f), Some(l)) => (f.time, l.time),
            _ => return Err(Error::Configuration("protocol has no couplings".into())),
        };
        Ok(self
            .coupling
            .rotation_for(self.trajectory.theta_at(last)? - self.trajectory.theta_at(first)?))
    }
}

/// One trial of a measurement protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    /// Pointer positions, one per coupling.
    pub readouts: Vec<f64>,
    /// Readouts thresholded at zero.
    pub outcomes: Option<Vec<i8>>,
    /// Spin state immediately after each coupling.
    pub states_after: Vec<DensityMatrix>,
    /// Spin state at the end of the trajectory.
    pub post_state: DensityMatrix,
    pub seed: u64,
}

/// Runs one trial: evolve, couple, evolve, ... up to the trajectory end.
pub fn simulate_trial<R: Rng + ?Sized>(cfg: &ProtocolConfig, rng: &mut R) -> Result<MeasurementRecord> {
    let mut state = DensityMatrix::from_ket(&cfg.spin_in)?;
    let mut now = cfg.trajectory.start_time();
    let mut readouts = Vec::with_capacity(cfg.couplings.len());
    let mut states_after = Vec::with_capacity(cfg.couplings.len());
    for c in &cfg.couplings {
        if c.time > now {
            state = state.evolve(&precession_between(&cfg.trajectory, &cfg.coupling, now, c.time)?)?;
            now = c.time;
        }
        let reading = pointer_measure(&state, &c.observable, &cfg.pointer, rng)?;
        readouts.push(reading.readout);
        state = reading.post;
        states_after.push(state.clone());
    }
    let end = cfg.trajectory.end_time();
    if end > now {
        state = state.evolve(&precession_between(&cfg.trajectory, &cfg.coupling, now, end)?)?;
    }
    Ok(MeasurementRecord {
        outcomes: Some(readouts.iter().map(|&q| binary_outcome(q)).collect()),
        readouts,
        states_after,
        post_state: state,
        seed: cfg.seed,
    })
}

/// All trials of a protocol, in trial order.
pub fn run_protocol(cfg: &ProtocolConfig) -> Result<Vec<MeasurementRecord>> {
    cfg.validate()?;
    run_trials(cfg.trials, cfg.seed, StreamTag(0), |_, rng| simulate_trial(cfg, rng))
        .into_iter()
        .collect()
}

/// Outcome of the single-spin `C_{π/2}` verification.
#[derive(Clone, Debug)]
pub struct PrecessionVerification {
    pub records: Vec<MeasurementRecord>,
    /// Mean of the per-trial estimator `(q₂ − q₁)/g` of `C_{π/2}`.
    pub c_mean: f64,
    pub c_stderr: f64,
    /// Fraction of trials whose two binary outcomes agree.
    pub sign_agreement: f64,
    /// Ensemble `⟨σ_z⟩` right after the first coupling.
    pub mean_sigma_z: f64,
    /// `√(1 − ⟨σ_z⟩²)` over the same ensemble.
    pub delta_sigma_z: f64,
}

/// Couples to σ_x at t₀ and to σ_y after a π/2 precession and checks that
/// the two readouts agree, i.e. that `C_{π/2} = σ_y(t) − σ_x(t₀)` vanishes.
pub fn verify_precession_single(cfg: &ProtocolConfig) -> Result<PrecessionVerification> {
    cfg.validate()?;
    if cfg.couplings.len() != 2
        || cfg.couplings[0].observable.max_abs_diff(&Operator::sigma_x()) > 1e-12
        || cfg.couplings[1].observable.max_abs_diff(&Operator::sigma_y()) > 1e-12
    {
        return Err(Error::Configuration(
            "C_pi/2 verification couples to σ_x and then σ_y".into(),
        ));
    }
    let chi = cfg.rotation_between_couplings()?;
    if (chi - FRAC_PI_2).abs() > 1e-9 {
        return Err(Error::Configuration(format!(
            "spin precesses by {chi} between the couplings, expected π/2"
        )));
    }
    let g = cfg.pointer.strength();
    if g == 0.0 {
        return Err(Error::Usage(
            "C estimator (q₂ − q₁)/g is undefined for zero coupling strength".into(),
        ));
    }
    let records = run_protocol(cfg)?;
    let c: Vec<f64> = records.iter().map(|r| (r.readouts[1] - r.readouts[0]) / g).collect();
    let (c_mean, c_stderr) = mean_stderr(&c);
    let agree = records
        .iter()
        .filter(|r| binary_outcome(r.readouts[0]) == binary_outcome(r.readouts[1]))
        .count();
    let z = sigma_z_after_first(&records)?;
    let (mean_sigma_z, _) = mean_stderr(&z);
    Ok(PrecessionVerification {
        sign_agreement: agree as f64 / records.len() as f64,
        c_mean,
        c_stderr,
        mean_sigma_z,
        delta_sigma_z: (1.0 - mean_sigma_z * mean_sigma_z).max(0.0).sqrt(),
        records,
    })
}

fn sigma_z_after_first(records: &[MeasurementRecord]) -> Result<Vec<f64>> {
    let z = Operator::sigma_z();
    records
        .iter()
        .map(|r| Ok(expectation(&z, &r.states_after[0])?.re))
        .collect()
}

/// Spread of the accumulated phase after the first coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseUncertainty {
    pub delta_phi: f64,
    pub stderr: f64,
    pub mean_sigma_z: f64,
    pub delta_sigma_z: f64,
    /// Angular sweep from the first coupling to the end of the path.
    pub window: f64,
    pub trials: usize,
    pub seed: u64,
}

/// `Δφ = (ξ/ħ)|Δθ_window|·Δσ_z`, with `Δσ_z = √(1 − ⟨σ_z⟩²)` estimated from
/// the simulated ensemble right after the first coupling. The window runs
/// from that coupling to the end of the trajectory.
pub fn phase_uncertainty_after_measurement(cfg: &ProtocolConfig) -> Result<PhaseUncertainty> {
    cfg.validate()?;
    let first_time = cfg
        .couplings
        .first()
        .map(|c| c.time)
        .unwrap_or(cfg.trajectory.start_time());
    let window = cfg.trajectory.end().theta - cfg.trajectory.theta_at(first_time)?;
    let scale = cfg.coupling.phase_for(window).abs();

    let z = if cfg.couplings.is_empty() {
        vec![expectation(&Operator::sigma_z(), &cfg.spin_in)?.re]
    } else {
        // Only the first coupling matters for the σ_z spread.
        let first_only = ProtocolConfig {
            couplings: cfg.couplings[..1].to_vec(),
            ..cfg.clone()
        };
        sigma_z_after_first(&run_protocol(&first_only)?)?
    };
    let (m, se_m) = mean_stderr(&z);
    let var = (1.0 - m * m).max(0.0);
    let delta_sigma_z = var.sqrt();
    // delta method: d√(1 − m²)/dm = −m/√(1 − m²)
    let stderr = if delta_sigma_z > 0.0 {
        scale * m.abs() / delta_sigma_z * se_m
    } else {
        0.0
    };
    Ok(PhaseUncertainty {
        delta_phi: scale * delta_sigma_z,
        stderr,
        mean_sigma_z: m,
        delta_sigma_z,
        window,
        trials: cfg.trials,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn quarter_turn_config(s: f64, spin: Ket, trials: usize) -> ProtocolConfig {
        let cfg = CouplingConfig::default();
        let sweep = cfg.sweep_for_rotation(FRAC_PI_2).unwrap();
        let traj = Trajectory::arc(0.0, 1.0, 0.0, sweep, 1.0).unwrap();
        let pointer = PointerParams::with_resolution(s).unwrap();
        ProtocolConfig::precession_check(traj, cfg, spin, pointer, trials, 5)
    }

    #[test]
    fn strong_check_agrees_in_sign() {
        let v = verify_precession_single(&quarter_turn_config(10.0, Ket::plus_x(), 10_000)).unwrap();
        assert!(v.sign_agreement >= 0.99);
        assert!(v.c_mean.abs() < 4.0 * v.c_stderr + 1e-3);
    }

    #[test]
    fn strong_check_randomizes_sigma_z() {
        let v = verify_precession_single(&quarter_turn_config(10.0, Ket::spin_up(), 10_000)).unwrap();
        assert!(v.mean_sigma_z.abs() <= 0.05);
        assert!(v.delta_sigma_z > 0.99);
    }

    #[test]
    fn verification_rejects_misconfiguration() {
        let mut cfg = quarter_turn_config(0.0, Ket::plus_x(), 10);
        assert!(matches!(verify_precession_single(&cfg), Err(Error::Usage(_))));
        cfg.pointer = PointerParams::strong();
        cfg.trajectory = Trajectory::arc(0.0, 1.0, 0.0, 0.5, 1.0).unwrap();
        assert!(matches!(verify_precession_single(&cfg), Err(Error::Configuration(_))));
        let mut swapped = quarter_turn_config(10.0, Ket::plus_x(), 10);
        swapped.couplings.swap(0, 1);
        swapped.couplings[0].time = 0.0;
        swapped.couplings[1].time = 1.0;
        assert!(matches!(verify_precession_single(&swapped), Err(Error::Configuration(_))));
    }

    #[test]
    fn phase_uncertainty_limits() {
        let strong = phase_uncertainty_after_measurement(&quarter_turn_config(10.0, Ket::spin_up(), 10_000)).unwrap();
        assert!((strong.delta_phi - FRAC_PI_4).abs() < 0.05);
        assert!((strong.window - FRAC_PI_4).abs() < 1e-15);
        let none = phase_uncertainty_after_measurement(&quarter_turn_config(0.0, Ket::spin_up(), 100)).unwrap();
        assert_eq!(none.delta_phi, 0.0);
    }

    #[test]
    fn phase_uncertainty_tracks_dephasing_oracle() {
        // oracle: ⟨σ_z⟩ = e^{−s²/2} so Δφ = (π/4)√(1 − e^{−s²})
        let mut last = 0.0;
        for s in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let u = phase_uncertainty_after_measurement(&quarter_turn_config(s, Ket::spin_up(), 20_000)).unwrap();
            let oracle = FRAC_PI_4 * (1.0 - (-s * s).exp()).sqrt();
            assert!((u.delta_phi - oracle).abs() < 5.0 * u.stderr + 0.01, "s={s}: {} vs {oracle}", u.delta_phi);
            assert!(u.delta_phi >= last - 0.01);
            last = u.delta_phi;
        }
    }

    #[test]
    fn records_are_reproducible() {
        let cfg = quarter_turn_config(1.0, Ket::plus_x(), 50);
        let a = run_protocol(&cfg).unwrap();
        let b = run_protocol(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].readouts.len(), 2);
        assert_eq!(a[0].states_after.len(), 2);
    }
}
