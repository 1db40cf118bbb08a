//! Charge ⟷ magnetic moment and charge ⟷ electric dipole dualities.
//!
//! Exchanging which particle is at rest maps a moment `μ` circling a line
//! charge `λ` onto a charge `q = λ` circling a flux `Φ = μ`, along the same
//! relative trajectory. The potential-only constructions compare a charge
//! between capacitor plates with a dipole `d(t)` in the field of a charged
//! plate.

use crate::dynamics::{trapezoid, winding_number, CouplingConfig, Trajectory};
use crate::error::{Error, Result};

/// Tolerance for [`duality_check`].
pub const DUALITY_TOL: f64 = 1e-12;

/// Moment circling a line charge.
#[derive(Clone, Debug, PartialEq)]
pub struct AcConfig {
    pub coupling: CouplingConfig,
    pub trajectory: Trajectory,
}

/// Charge `q` circling a point flux `Φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbConfig {
    pub charge: f64,
    pub flux: f64,
    pub hbar: f64,
    pub mass: f64,
    pub trajectory: Trajectory,
}

impl AcConfig {
    pub fn dualize(&self) -> AbConfig {
        AbConfig {
            charge: self.coupling.lambda(),
            flux: self.coupling.mu(),
            hbar: self.coupling.hbar(),
            mass: self.coupling.mass(),
            trajectory: self.trajectory.clone(),
        }
    }

    /// Spin-up phase `(ξ/ħ)Δθ`.
    pub fn phase(&self) -> f64 {
        ac_phase(self)
    }
}

impl AbConfig {
    pub fn dualize(&self) -> Result<AcConfig> {
        let coupling = CouplingConfig::new(self.flux, self.charge)?
            .with_hbar(self.hbar)?
            .with_mass(self.mass)?;
        Ok(AcConfig {
            coupling,
            trajectory: self.trajectory.clone(),
        })
    }

    pub fn phase(&self) -> f64 {
        ab_phase(self)
    }
}

/// `qΦ·n/ħ` with `n` the (fractional) winding of the relative trajectory.
pub fn ab_phase(ab: &AbConfig) -> f64 {
    ab.charge * ab.flux * winding_number(&ab.trajectory) / ab.hbar
}

pub fn ac_phase(ac: &AcConfig) -> f64 {
    ac.coupling.phase_for(ac.trajectory.delta_theta())
}

fn check_endpoints(samples: &[(f64, f64)], what: &str) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::Usage(format!("{what} needs at least two samples")));
    }
    let (first, last) = (samples[0].1, samples[samples.len() - 1].1);
    if first != 0.0 || last != 0.0 {
        return Err(Error::Usage(format!(
            "{what} must vanish at both ends, got {first} and {last}"
        )));
    }
    Ok(())
}

/// Charge between two plates whose potential difference is switched on and
/// off again.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacitorScenario {
    potential_samples: Vec<(f64, f64)>,
    charge: f64,
}

impl CapacitorScenario {
    pub fn new(potential_samples: Vec<(f64, f64)>, charge: f64) -> Result<Self> {
        check_endpoints(&potential_samples, "potential series")?;
        trapezoid(&potential_samples, "potential series")?;
        if !charge.is_finite() {
            return Err(Error::Usage("charge must be finite".into()));
        }
        Ok(Self {
            potential_samples,
            charge,
        })
    }

    pub fn potential_samples(&self) -> &[(f64, f64)] {
        &self.potential_samples
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }
}

/// Time-dependent dipole in the uniform field `E` of a charged plate.
#[derive(Clone, Debug, PartialEq)]
pub struct DipoleScenario {
    dipole_samples: Vec<(f64, f64)>,
    field: f64,
}

impl DipoleScenario {
    pub fn new(dipole_samples: Vec<(f64, f64)>, field: f64) -> Result<Self> {
        check_endpoints(&dipole_samples, "dipole series")?;
        trapezoid(&dipole_samples, "dipole series")?;
        if !field.is_finite() {
            return Err(Error::Usage("field must be finite".into()));
        }
        Ok(Self {
            dipole_samples,
            field,
        })
    }

    /// Image of a capacitor scenario: `d(t)·E = q·V(t)`.
    pub fn from_capacitor(cap: &CapacitorScenario, field: f64) -> Result<Self> {
        if field == 0.0 {
            return Err(Error::Usage("dual dipole needs a nonzero field".into()));
        }
        let samples = cap
            .potential_samples
            .iter()
            .map(|&(t, v)| (t, cap.charge * v / field))
            .collect();
        Self::new(samples, field)
    }

    pub fn dipole_samples(&self) -> &[(f64, f64)] {
        &self.dipole_samples
    }

    pub fn field(&self) -> f64 {
        self.field
    }
}

/// `(q/ħ)∫V dt`.
pub fn capacitor_potential_phase(s: &CapacitorScenario, cfg: &CouplingConfig) -> Result<f64> {
    Ok(s.charge / cfg.hbar() * trapezoid(&s.potential_samples, "potential series")?)
}

/// `(1/ħ)∫d·E dt`.
pub fn dipole_potential_phase(s: &DipoleScenario, cfg: &CouplingConfig) -> Result<f64> {
    Ok(s.field / cfg.hbar() * trapezoid(&s.dipole_samples, "dipole series")?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    pub capacitor_phase: f64,
    pub dipole_phase: f64,
    pub phases_equal: bool,
    /// Whether the dipole series is the sample-by-sample image of `q·V(t)`.
    pub samples_related: bool,
}

/// Compares the two potential-only phases; a mismatch is reported, not raised.
pub fn duality_check(
    capacitor: &CapacitorScenario,
    dipole: &DipoleScenario,
    cfg: &CouplingConfig,
) -> Result<DualityReport> {
    let capacitor_phase = capacitor_potential_phase(capacitor, cfg)?;
    let dipole_phase = dipole_potential_phase(dipole, cfg)?;
    let scale = capacitor_phase.abs().max(dipole_phase.abs()).max(1.0);
    let samples_related = capacitor.potential_samples.len() == dipole.dipole_samples.len()
        && capacitor
            .potential_samples
            .iter()
            .zip(&dipole.dipole_samples)
            .all(|(&(tc, v), &(td, d))| {
                tc == td && (capacitor.charge * v - d * dipole.field).abs() <= DUALITY_TOL * scale
            });
    Ok(DualityReport {
        capacitor_phase,
        dipole_phase,
        phases_equal: (capacitor_phase - dipole_phase).abs() <= DUALITY_TOL * scale,
        samples_related,
    })
}
