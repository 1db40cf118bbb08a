//! Simulation of Aharonov–Casher type topological phases for a spin-1/2
//! magnetic moment: precession along prescribed paths, two-path
//! interference, pointer measurements of the precession and the loss of
//! phase coherence they cause, and the charge/moment/dipole dualities.

pub mod duality;
pub mod dynamics;
pub mod error;
pub mod interferometer;
pub mod measurement;
pub mod qlinalg;
pub mod rng;

pub use dynamics::{CouplingConfig, Trajectory, TrajectorySample};
pub use error::{Error, Result};
pub use interferometer::{InterferenceReport, TwoPathSetup};
pub use measurement::{PointerParams, ProtocolConfig};
pub use qlinalg::{DensityMatrix, Ket, Operator};
