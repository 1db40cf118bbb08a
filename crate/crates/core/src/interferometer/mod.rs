//! Two-path interference of a spin-carrying particle.
//!
//! The path is a qubit with `|a⟩ = |0⟩` and `|b⟩ = |1⟩`; joint states live in
//! `path ⊗ spin` (dimension 4, path index most significant). Recombination is
//! not simulated: visibility and which-path distinguishability are read off
//! the joint state, which is equivalent to optimizing the final beamsplitter
//! phase.

mod comparison;

pub use comparison::{topological_vs_uniform, CpiStatistics, TopologyComparison};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{dynamical_phase, precession_between, CouplingConfig, Trajectory};
use crate::error::{Error, Result};
use crate::qlinalg::{trace_distance, DensityMatrix, Ket, Operator, Tensor, TOL};

/// Visibility below which the interference phase is reported as undefined.
pub const PHASE_VISIBILITY_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arm {
    A,
    B,
}

/// A symmetric two-arm interferometer around the charged line.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPathSetup {
    pub arm_a: Trajectory,
    pub arm_b: Trajectory,
    pub spin_in: Ket,
    pub coupling: CouplingConfig,
    /// Adds the spin-independent `(2ξ/ħm)∫dt/r²` phase of each arm.
    pub include_dynamical_phase: bool,
    /// Phases imprinted on each arm by an engineered charge distribution.
    pub extra_phase_a: f64,
    pub extra_phase_b: f64,
}

impl TwoPathSetup {
    pub fn new(
        arm_a: Trajectory,
        arm_b: Trajectory,
        spin_in: Ket,
        coupling: CouplingConfig,
    ) -> Result<Self> {
        let setup = Self {
            arm_a,
            arm_b,
            spin_in,
            coupling,
            include_dynamical_phase: false,
            extra_phase_a: 0.0,
            extra_phase_b: 0.0,
        };
        setup.validate()?;
        Ok(setup)
    }

    pub fn with_extra_phases(mut self, a: f64, b: f64) -> Self {
        self.extra_phase_a = a;
        self.extra_phase_b = b;
        self
    }

    pub fn with_dynamical_phase(mut self, on: bool) -> Self {
        self.include_dynamical_phase = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.spin_in.dim() != 2 || !self.spin_in.is_normalized() {
            return Err(Error::Usage(
                "spin_in must be a normalized two-component ket".into(),
            ));
        }
        if self.arm_a.start_time() != self.arm_b.start_time()
            || self.arm_a.end_time() != self.arm_b.end_time()
        {
            return Err(Error::Usage(format!(
                "arms must share start and end times: [{}, {}] vs [{}, {}]",
                self.arm_a.start_time(),
                self.arm_a.end_time(),
                self.arm_b.start_time(),
                self.arm_b.end_time()
            )));
        }
        if !(self.extra_phase_a.is_finite() && self.extra_phase_b.is_finite()) {
            return Err(Error::Usage("extra phases must be finite".into()));
        }
        Ok(())
    }

    pub fn start_time(&self) -> f64 {
        self.arm_a.start_time()
    }

    pub fn end_time(&self) -> f64 {
        self.arm_a.end_time()
    }

    pub fn arm(&self, arm: Arm) -> &Trajectory {
        match arm {
            Arm::A => &self.arm_a,
            Arm::B => &self.arm_b,
        }
    }

    /// Spin-independent phase carried by an arm: `e^{i(extra − dynamical)}`.
    pub fn arm_phase(&self, arm: Arm) -> f64 {
        let extra = match arm {
            Arm::A => self.extra_phase_a,
            Arm::B => self.extra_phase_b,
        };
        let dynamical = if self.include_dynamical_phase {
            dynamical_phase(self.arm(arm), &self.coupling)
        } else {
            0.0
        };
        extra - dynamical
    }

    /// `(e^{iφ_a}|a⟩ + e^{iφ_b}|b⟩)/√2 ⊗ |χ⟩` at the common start time.
    pub fn initial_state(&self) -> Result<DensityMatrix> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let path = Ket::new(vec![
            Complex64::from_polar(h, self.arm_phase(Arm::A)),
            Complex64::from_polar(h, self.arm_phase(Arm::B)),
        ])?;
        DensityMatrix::from_ket(&path.tensor(&self.spin_in))
    }

    /// Block-diagonal evolution `|a⟩⟨a| ⊗ U_a + |b⟩⟨b| ⊗ U_b` from `t0` to `t1`.
    pub fn evolution_between(&self, t0: f64, t1: f64) -> Result<Operator> {
        let ua = precession_between(&self.arm_a, &self.coupling, t0, t1)?;
        let ub = precession_between(&self.arm_b, &self.coupling, t0, t1)?;
        let mut m = DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(ua.matrix());
        m.view_mut((2, 2), (2, 2)).copy_from(ub.matrix());
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical(format!(
                "arm evolution overflowed (xi/hbar = {:e})",
                self.coupling.xi() / self.coupling.hbar()
            )));
        }
        Operator::from_matrix(m)
    }

    /// Same experiment with the arm labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            arm_a: self.arm_b.clone(),
            arm_b: self.arm_a.clone(),
            extra_phase_a: self.extra_phase_b,
            extra_phase_b: self.extra_phase_a,
            ..self.clone()
        }
    }
}

/// Interference figures of merit of a joint path ⊗ spin state.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceReport {
    pub visibility: f64,
    pub distinguishability: f64,
    /// `None` when the visibility is too small for the phase to mean anything.
    pub relative_phase: Option<f64>,
    pub joint_state: DensityMatrix,
}

impl InterferenceReport {
    pub fn from_joint(joint: DensityMatrix) -> Result<Self> {
        let visibility = visibility(&joint)?;
        let distinguishability = distinguishability(&joint)?;
        let relative_phase = match relative_phase(&joint) {
            Ok(p) => Some(p),
            Err(Error::PhaseUndefined(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            visibility,
            distinguishability,
            relative_phase,
            joint_state: joint,
        })
    }
}

/// Unmeasured passage through both arms; returns the final joint state.
pub fn run_two_path(setup: &TwoPathSetup) -> Result<DensityMatrix> {
    setup.validate()?;
    let u = setup.evolution_between(setup.start_time(), setup.end_time())?;
    setup.initial_state()?.evolve(&u)
}

pub fn analyze(setup: &TwoPathSetup) -> Result<InterferenceReport> {
    InterferenceReport::from_joint(run_two_path(setup)?)
}

fn check_joint(joint: &DensityMatrix) -> Result<()> {
    if joint.dim() != 4 {
        return Err(Error::Dimension(format!(
            "expected a 4-dim path ⊗ spin state, got dim {}",
            joint.dim()
        )));
    }
    Ok(())
}

/// Spin trace of the path-coherence block, `Σ_s ρ[(a,s),(b,s)]`.
fn coherence(joint: &DensityMatrix) -> Complex64 {
    joint.entry(0, 2) + joint.entry(1, 3)
}

/// Best fringe contrast over reference phases, `2|Tr_spin ⟨a|ρ|b⟩|`.
pub fn visibility(joint: &DensityMatrix) -> Result<f64> {
    check_joint(joint)?;
    Ok(2.0 * coherence(joint).norm())
}

/// Normalized spin states conditioned on each arm.
pub fn conditional_spin_states(joint: &DensityMatrix) -> Result<(DensityMatrix, DensityMatrix)> {
    check_joint(joint)?;
    let block = |offset: usize| -> Result<DensityMatrix> {
        let m = joint.matrix().view((offset, offset), (2, 2)).into_owned();
        if m.trace().re <= TOL {
            return Err(Error::Usage("an arm carries no probability".into()));
        }
        DensityMatrix::from_unnormalized(m)
    };
    Ok((block(0)?, block(2)?))
}

/// Trace distance between the two conditional spin states; the optimal
/// which-path guess succeeds with probability `(1 + D)/2`.
pub fn distinguishability(joint: &DensityMatrix) -> Result<f64> {
    let (a, b) = conditional_spin_states(joint)?;
    trace_distance(&a, &b)
}

/// Interference phase `arg Tr_spin ⟨a|ρ|b⟩`, in `(−π, π]`.
pub fn relative_phase(joint: &DensityMatrix) -> Result<f64> {
    let v = visibility(joint)?;
    if v <= PHASE_VISIBILITY_FLOOR {
        return Err(Error::PhaseUndefined(v));
    }
    Ok(wrap_phase(coherence(joint).arg()))
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_phase(angle: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}
