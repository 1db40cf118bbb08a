//! Gaussian-pointer measurements of spin components along a trajectory.
//!
//! A pointer of width `Δ` coupled with strength `g` to an observable `A`
//! (eigenvalues ±1) reads `q = ±g + Δ·N(0,1)` and leaves the state updated by
//! the Kraus operator `K(q)`. Averaged over readouts this damps coherences
//! between the `A = ±1` eigenspaces by `e^{−s²/2}` with `s = g/Δ`.

mod decoherence;
mod ensemble;
mod pointer;
mod protocol;

pub use decoherence::{
    c_pi_indistinguishability, compare_arm_statistics, decohere_interferometer,
    decohere_interferometer_sampled, marker_distinguishability, measured_two_path,
    simulate_two_path_trial, total_variation, two_path_with_records, unmeasured_report,
    which_path_guess, ArmComparison,
};
pub(crate) use decoherence::{histogram, pair_index};
pub use ensemble::{ensemble_precession_test, EnsembleStatistics, DETECTION_ALPHA};
pub use pointer::{
    binary_outcome, dephase, pointer_measure, pointer_update, readout_density, PointerParams,
    PointerReading, ToDensity, STRONG_RESOLUTION,
};
pub use protocol::{
    phase_uncertainty_after_measurement, run_protocol, simulate_trial, verify_precession_single,
    Coupling, MeasurementRecord, PhaseUncertainty, PrecessionVerification, ProtocolConfig,
};
