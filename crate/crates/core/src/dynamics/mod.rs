//! Spin dynamics along prescribed planar trajectories around a charged line.
//!
//! Conventions: the precession unitary is `exp(−i (ξ/ħ) Δθ σ_z)`, each σ_z
//! eigenstate accumulates `∓(ξ/ħ)Δθ`, and transverse spin components rotate
//! by `χ = 2(ξ/ħ)Δθ`. The momentum factor of the spin equations is read off
//! the classical path, `p_θ/mr² → θ̇(t)`.

mod coupling;
mod integrate;
mod phases;
mod precession;
mod trajectory;

pub use coupling::CouplingConfig;
pub use integrate::{integrate_heisenberg, BlochSeries, DEFAULT_STEP};
pub(crate) use phases::trapezoid;
pub use phases::{dynamical_phase, scalar_ab_phase};
pub use precession::{
    c_half_pi, correlation_observable, heisenberg_spin, phase_operator, precession_between,
    precession_for_sweep, precession_unitary, rest_frame_field, SpinAxis,
};
pub use trajectory::{winding_number, Trajectory, TrajectorySample};
