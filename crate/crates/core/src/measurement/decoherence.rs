use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::pointer::{
    binary_outcome, dephase, eigenprojectors, pointer_measure, pointer_update, readout_density,
    PointerParams,
};
use super::protocol::Coupling;
use crate::dynamics::{precession_between, CouplingConfig, Trajectory};
use crate::error::{Error, Result};
use crate::interferometer::{run_two_path, InterferenceReport, TwoPathSetup};
use crate::qlinalg::{fidelity, partial_trace, trace_distance, DensityMatrix, Ket, Operator, Tensor};
use crate::rng::{run_trials, StreamTag};

fn on_spin(observable: &Operator) -> Result<Operator> {
    if observable.dim() != 2 {
        return Err(Error::Dimension("pointer couples to a 2x2 spin observable".into()));
    }
    Ok(Operator::identity(2).tensor(observable))
}

fn check_time(setup: &TwoPathSetup, t: f64) -> Result<()> {
    if t < setup.start_time() || t > setup.end_time() {
        return Err(Error::Usage(format!(
            "coupling time {t} outside arm span [{}, {}]",
            setup.start_time(),
            setup.end_time()
        )));
    }
    Ok(())
}

/// Joint state after a sequence of non-selective spin measurements.
pub fn measured_two_path(
    setup: &TwoPathSetup,
    couplings: &[Coupling],
    pointer: &PointerParams,
) -> Result<DensityMatrix> {
    setup.validate()?;
    let mut state = setup.initial_state()?;
    let mut now = setup.start_time();
    for c in couplings {
        check_time(setup, c.time)?;
        if c.time < now {
            return Err(Error::Usage("coupling times must be increasing".into()));
        }
        state = state.evolve(&setup.evolution_between(now, c.time)?)?;
        now = c.time;
        state = dephase(&state, &on_spin(&c.observable)?, pointer)?;
    }
    state.evolve(&setup.evolution_between(now, setup.end_time())?)
}

/// The two pointer wavefunctions, shifted by `±g`, written in an orthonormal
/// basis of their span: `|φ±⟩ = α|0⟩ ± β|1⟩` with `⟨φ₊|φ₋⟩ = e^{−s²/2}`.
fn record_branches(p: &PointerParams) -> [DVector<Complex64>; 2] {
    let f = p.dephasing_factor();
    let a = ((1.0 + f) / 2.0).sqrt();
    let b = ((1.0 - f) / 2.0).max(0.0).sqrt();
    let v = |sign: f64| DVector::from_vec(vec![Complex64::new(a, 0.0), Complex64::new(sign * b, 0.0)]);
    [v(1.0), v(-1.0)]
}

/// Joint state of path ⊗ spin ⊗ pointer records, one record qubit appended
/// (least significant) per coupling.
pub fn two_path_with_records(
    setup: &TwoPathSetup,
    couplings: &[Coupling],
    pointer: &PointerParams,
) -> Result<DensityMatrix> {
    setup.validate()?;
    let mut m = setup.initial_state()?.matrix().clone();
    let mut records = 1usize;
    let mut now = setup.start_time();
    let lift = |op: &Operator, records: usize| op.tensor(&Operator::identity(records));
    let branches = record_branches(pointer);
    for c in couplings {
        check_time(setup, c.time)?;
        if c.time < now {
            return Err(Error::Usage("coupling times must be increasing".into()));
        }
        let u = lift(&setup.evolution_between(now, c.time)?, records);
        m = u.matrix() * m * u.matrix().adjoint();
        now = c.time;
        let (plus, minus) = eigenprojectors(&on_spin(&c.observable)?)?;
        let w: DMatrix<Complex64> = lift(&plus, records).matrix().kronecker(&branches[0])
            + lift(&minus, records).matrix().kronecker(&branches[1]);
        m = &w * m * w.adjoint();
        records *= 2;
    }
    let u = lift(&setup.evolution_between(now, setup.end_time())?, records);
    DensityMatrix::from_unnormalized(u.matrix() * m * u.matrix().adjoint())
}

/// Trace distance between what each arm leaves in everything but the path
/// qubit (spin and pointer records).
pub fn marker_distinguishability(full: &DensityMatrix) -> Result<f64> {
    let n = full.dim();
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Dimension(format!("no path qubit in a dim-{n} state")));
    }
    let half = n / 2;
    let block = |r: usize| DensityMatrix::from_unnormalized(full.matrix().view((r, r), (half, half)).into_owned());
    trace_distance(&block(0)?, &block(half)?)
}

/// Interferometer with one non-selective pointer coupling to a spin
/// component at `coupling_time`, averaged over readouts analytically.
///
/// The reported joint state and visibility have the pointer traced out;
/// the distinguishability counts the pointer record as a which-path marker
/// alongside the spin.
pub fn decohere_interferometer(
    setup: &TwoPathSetup,
    pointer: &PointerParams,
    coupling_time: f64,
    observable: &Operator,
) -> Result<InterferenceReport> {
    let coupling = [Coupling {
        time: coupling_time,
        observable: observable.clone(),
    }];
    let full = two_path_with_records(setup, &coupling, pointer)?;
    let joint = partial_trace(&full, &[4, 2], 0)?;
    let mut report = InterferenceReport::from_joint(joint)?;
    report.distinguishability = marker_distinguishability(&full)?;
    Ok(report)
}

/// Selective trial on the joint state: readouts and final joint state.
pub fn simulate_two_path_trial<R: Rng + ?Sized>(
    setup: &TwoPathSetup,
    couplings: &[Coupling],
    pointer: &PointerParams,
    rng: &mut R,
) -> Result<(Vec<f64>, DensityMatrix)> {
    let mut state = setup.initial_state()?;
    let mut now = setup.start_time();
    let mut readouts = Vec::with_capacity(couplings.len());
    for c in couplings {
        check_time(setup, c.time)?;
        state = state.evolve(&setup.evolution_between(now, c.time)?)?;
        now = c.time;
        let reading = pointer_measure(&state, &on_spin(&c.observable)?, pointer, rng)?;
        readouts.push(reading.readout);
        state = reading.post;
    }
    let state = state.evolve(&setup.evolution_between(now, setup.end_time())?)?;
    Ok((readouts, state))
}

/// Same as [`decohere_interferometer`] but averaging the selective Kraus
/// post-states over `samples` sampled readouts. The readouts are discarded,
/// so the distinguishability here covers the spin alone.
pub fn decohere_interferometer_sampled(
    setup: &TwoPathSetup,
    pointer: &PointerParams,
    coupling_time: f64,
    observable: &Operator,
    samples: usize,
    seed: u64,
) -> Result<InterferenceReport> {
    setup.validate()?;
    if samples == 0 {
        return Err(Error::Usage("need at least one readout sample".into()));
    }
    let coupling = [Coupling {
        time: coupling_time,
        observable: observable.clone(),
    }];
    let states: Result<Vec<DensityMatrix>> = run_trials(samples, seed, StreamTag(2), |_, rng| {
        simulate_two_path_trial(setup, &coupling, pointer, rng).map(|(_, s)| s)
    })
    .into_iter()
    .collect();
    let states = states?;
    let w = 1.0 / samples as f64;
    let parts: Vec<(f64, &DensityMatrix)> = states.iter().map(|s| (w, s)).collect();
    InterferenceReport::from_joint(DensityMatrix::mixture(&parts)?)
}

/// Success rate of guessing the arm from the pointer readout by maximum
/// likelihood, estimated over `trials` simulated passages.
pub fn which_path_guess(
    setup: &TwoPathSetup,
    pointer: &PointerParams,
    coupling_time: f64,
    observable: &Operator,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    setup.validate()?;
    check_time(setup, coupling_time)?;
    if trials == 0 {
        return Err(Error::Usage("need at least one trial".into()));
    }
    let spin0 = DensityMatrix::from_ket(&setup.spin_in)?;
    let conditional = |arm: &Trajectory| -> Result<DensityMatrix> {
        spin0.evolve(&precession_between(
            arm,
            &setup.coupling,
            setup.start_time(),
            coupling_time,
        )?)
    };
    let (rho_a, rho_b) = (conditional(&setup.arm_a)?, conditional(&setup.arm_b)?);
    let hits: Result<Vec<bool>> = run_trials(trials, seed, StreamTag(3), |_, rng| {
        let took_a = rng.random::<bool>();
        let rho = if took_a { &rho_a } else { &rho_b };
        let q = pointer_measure(rho, observable, pointer, rng)?.readout;
        let la = readout_density(&rho_a, observable, pointer, q)?;
        let lb = readout_density(&rho_b, observable, pointer, q)?;
        let guess_a = if la == lb { rng.random::<bool>() } else { la > lb };
        Ok(guess_a == took_a)
    })
    .into_iter()
    .collect();
    let hits = hits?;
    Ok(hits.iter().filter(|&&h| h).count() as f64 / trials as f64)
}

/// Outcome-pair index for two ±1 outcomes: `(+,+), (+,−), (−,+), (−,−)`.
pub(crate) fn pair_index(first: f64, second: f64) -> usize {
    usize::from(binary_outcome(first) < 0) * 2 + usize::from(binary_outcome(second) < 0)
}

pub(crate) fn histogram(pairs: impl Iterator<Item = usize>) -> [f64; 4] {
    let mut counts = [0usize; 4];
    let mut n = 0usize;
    for k in pairs {
        counts[k] += 1;
        n += 1;
    }
    counts.map(|c| c as f64 / n.max(1) as f64)
}

pub fn total_variation(p: &[f64; 4], q: &[f64; 4]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Readout statistics of the `C_π` protocol (σ_x at both ends) on two arms.
#[derive(Clone, Debug, PartialEq)]
pub struct ArmComparison {
    /// Outcome-pair frequencies `(+,+), (+,−), (−,+), (−,−)` per arm.
    pub distribution_a: [f64; 4],
    pub distribution_b: [f64; 4],
    pub tv_distance: f64,
    /// Smallest fidelity between the two arms' post-measurement spin states
    /// given identical readouts, over the readouts sampled on arm a.
    pub min_fidelity: f64,
    pub trials: usize,
    pub seed: u64,
}

fn c_pi_couplings(arm: &Trajectory) -> [Coupling; 2] {
    [
        Coupling {
            time: arm.start_time(),
            observable: Operator::sigma_x(),
        },
        Coupling {
            time: arm.end_time(),
            observable: Operator::sigma_x(),
        },
    ]
}

/// Deterministic spin evolution along `arm` given fixed readouts.
fn conditioned_spin(
    arm: &Trajectory,
    cfg: &CouplingConfig,
    spin_in: &DensityMatrix,
    couplings: &[Coupling],
    pointer: &PointerParams,
    readouts: &[f64],
) -> Result<DensityMatrix> {
    let mut state = spin_in.clone();
    let mut now = arm.start_time();
    for (c, &q) in couplings.iter().zip(readouts) {
        state = state.evolve(&precession_between(arm, cfg, now, c.time)?)?;
        now = c.time;
        state = pointer_update(&state, &c.observable, pointer, q)?;
    }
    state.evolve(&precession_between(arm, cfg, now, arm.end_time())?)
}

/// Runs the `C_π` protocol separately on two arms and compares what the
/// pointer sees.
pub fn compare_arm_statistics(
    arm_a: &Trajectory,
    arm_b: &Trajectory,
    cfg: &CouplingConfig,
    spin_in: &Ket,
    pointer: &PointerParams,
    trials: usize,
    seed: u64,
) -> Result<ArmComparison> {
    if trials == 0 {
        return Err(Error::Usage("need at least one trial".into()));
    }
    if arm_a.start_time() != arm_b.start_time() || arm_a.end_time() != arm_b.end_time() {
        return Err(Error::Usage("arms must share start and end times".into()));
    }
    let rho0 = DensityMatrix::from_ket(spin_in)?;
    let couplings = c_pi_couplings(arm_a);
    let sample = |arm: &Trajectory, tag: u32| -> Result<Vec<Vec<f64>>> {
        run_trials(trials, seed, StreamTag(tag), |_, rng| {
            let mut state = rho0.clone();
            let mut now = arm.start_time();
            let mut readouts = Vec::with_capacity(2);
            for c in &couplings {
                state = state.evolve(&precession_between(arm, cfg, now, c.time)?)?;
                now = c.time;
                let r = pointer_measure(&state, &c.observable, pointer, rng)?;
                readouts.push(r.readout);
                state = r.post;
            }
            Ok(readouts)
        })
        .into_iter()
        .collect()
    };
    let reads_a = sample(arm_a, 4)?;
    let reads_b = sample(arm_b, 5)?;
    let distribution_a = histogram(reads_a.iter().map(|r| pair_index(r[0], r[1])));
    let distribution_b = histogram(reads_b.iter().map(|r| pair_index(r[0], r[1])));

    let mut min_fidelity: f64 = 1.0;
    for r in &reads_a {
        let post_a = conditioned_spin(arm_a, cfg, &rho0, &couplings, pointer, r)?;
        let post_b = conditioned_spin(arm_b, cfg, &rho0, &couplings, pointer, r)?;
        min_fidelity = min_fidelity.min(fidelity(&post_a, &post_b)?);
    }
    Ok(ArmComparison {
        tv_distance: total_variation(&distribution_a, &distribution_b),
        distribution_a,
        distribution_b,
        min_fidelity,
        trials,
        seed,
    })
}

/// Clockwise against counter-clockwise half-precession arms
/// (`Δθ = ±ħπ/2ξ`, spin rotations ±π) under the `C_π` protocol, with a
/// σ_z = +1 input spin.
pub fn c_pi_indistinguishability(
    cfg: &CouplingConfig,
    pointer: &PointerParams,
    trials: usize,
    seed: u64,
) -> Result<ArmComparison> {
    let sweep = cfg.sweep_for_rotation(std::f64::consts::PI)?;
    let cw = Trajectory::arc(0.0, 1.0, 0.0, sweep, 1.0)?;
    let ccw = Trajectory::arc(0.0, 1.0, 0.0, -sweep, 1.0)?;
    compare_arm_statistics(&cw, &ccw, cfg, &Ket::spin_up(), pointer, trials, seed)
}

/// Unmeasured report, for comparison with the measured ones.
pub fn unmeasured_report(setup: &TwoPathSetup) -> Result<InterferenceReport> {
    InterferenceReport::from_joint(run_two_path(setup)?)
}
