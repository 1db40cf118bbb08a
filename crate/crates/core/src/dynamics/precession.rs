use num_complex::Complex64;

use super::{CouplingConfig, Trajectory};
use crate::error::{Error, Result};
use crate::qlinalg::Operator;

/// Spin-space evolution `exp(−i (ξ/ħ) Δθ σ_z)` for an angular sweep.
///
/// Rotates the transverse Bloch components by `2(ξ/ħ)Δθ`, while each σ_z
/// eigenstate picks up the phase `∓(ξ/ħ)Δθ`.
pub fn precession_for_sweep(delta_theta: f64, cfg: &CouplingConfig) -> Operator {
    let phase = cfg.phase_for(delta_theta);
    Operator::diagonal(&[
        Complex64::from_polar(1.0, -phase),
        Complex64::from_polar(1.0, phase),
    ])
}

pub fn precession_unitary(traj: &Trajectory, cfg: &CouplingConfig) -> Operator {
    precession_for_sweep(traj.delta_theta(), cfg)
}

/// Evolution accumulated between two instants on the same trajectory.
pub fn precession_between(
    traj: &Trajectory,
    cfg: &CouplingConfig,
    t0: f64,
    t1: f64,
) -> Result<Operator> {
    Ok(precession_for_sweep(traj.theta_at(t1)? - traj.theta_at(t0)?, cfg))
}

/// Phase operator `(ξ/ħ)(θ_end − θ_start) σ_z`, in radians.
pub fn phase_operator(traj: &Trajectory, cfg: &CouplingConfig) -> Operator {
    Operator::sigma_z().scale_re(cfg.phase_for(traj.delta_theta()))
}

/// Rest-frame magnetic field `B_z = 2ξ θ̇(t)` seen by the moment.
pub fn rest_frame_field(traj: &Trajectory, cfg: &CouplingConfig, t: f64) -> Result<f64> {
    Ok(2.0 * cfg.xi() * traj.angular_velocity_at(t)?)
}

/// Cartesian spin component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl SpinAxis {
    pub fn pauli(self) -> Operator {
        match self {
            SpinAxis::X => Operator::sigma_x(),
            SpinAxis::Y => Operator::sigma_y(),
            SpinAxis::Z => Operator::sigma_z(),
        }
    }
}

/// Heisenberg-picture spin component at the end of `traj`, written as the
/// closed-form solution of the precession equations:
/// `σ_x(t) = cos χ σ_x − sin χ σ_y`, `σ_y(t) = sin χ σ_x + cos χ σ_y`,
/// `σ_z(t) = σ_z`.
pub fn heisenberg_spin(traj: &Trajectory, cfg: &CouplingConfig, axis: SpinAxis) -> Operator {
    let chi = cfg.rotation_for(traj.delta_theta());
    let (s, c) = chi.sin_cos();
    match axis {
        SpinAxis::X => Operator::spin_along([c, -s, 0.0]),
        SpinAxis::Y => Operator::spin_along([s, c, 0.0]),
        SpinAxis::Z => Operator::sigma_z(),
    }
}

/// `C_φ = U† σ_i U − σ_i(t)`: vanishes whenever the spin precessed as the
/// equations of motion say.
pub fn correlation_observable(traj: &Trajectory, cfg: &CouplingConfig, axis: SpinAxis) -> Operator {
    let u = precession_unitary(traj, cfg);
    let conjugated = &(&u.adjoint() * &axis.pauli()) * &u;
    &conjugated - &heisenberg_spin(traj, cfg, axis)
}

/// `C_{π/2} = σ_y(t) − σ_x(t₀)` for a trajectory rotating the spin by π/2.
pub fn c_half_pi(traj: &Trajectory, cfg: &CouplingConfig) -> Result<Operator> {
    let chi = cfg.rotation_for(traj.delta_theta());
    if (chi - std::f64::consts::FRAC_PI_2).abs() > 1e-9 {
        return Err(Error::Configuration(format!(
            "C_pi/2 needs a π/2 precession, trajectory gives {chi}"
        )));
    }
    let u = precession_unitary(traj, cfg);
    let sigma_y_t = &(&u.adjoint() * &Operator::sigma_y()) * &u;
    Ok(&sigma_y_t - &Operator::sigma_x())
}
