use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Physical constants of the moment/line-charge system, natural units by
/// default (`ħ = m = 1`).
///
/// `xi` is always derived as `λμ/2π`, so the invariant holds by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingConfig {
    mu: f64,
    lambda: f64,
    xi: f64,
    hbar: f64,
    mass: f64,
}

fn finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Usage(format!("{name} must be finite, got {value}")))
    }
}

impl CouplingConfig {
    /// Magnetic moment `mu` around a wire of line charge `lambda`.
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        let mu = finite("mu", mu)?;
        let lambda = finite("lambda", lambda)?;
        Ok(Self {
            mu,
            lambda,
            xi: lambda * mu / TAU,
            hbar: 1.0,
            mass: 1.0,
        })
    }

    /// Unit moment with the line charge chosen to give coupling `xi`.
    pub fn from_xi(xi: f64) -> Result<Self> {
        let xi = finite("xi", xi)?;
        Self::new(1.0, TAU * xi)
    }

    /// Moment `mu` with the line charge chosen to give coupling `xi`.
    pub fn from_mu_xi(mu: f64, xi: f64) -> Result<Self> {
        let mu = finite("mu", mu)?;
        let xi = finite("xi", xi)?;
        if mu == 0.0 {
            return Err(Error::Usage("mu = 0 cannot produce a nonzero xi".into()));
        }
        Self::new(mu, TAU * xi / mu)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Usage(format!("hbar must be positive, got {hbar}")));
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn with_mass(mut self, mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Usage(format!("mass must be positive, got {mass}")));
        }
        self.mass = mass;
        Ok(self)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Phase per σ_z eigenvalue for an angular sweep `delta_theta`.
    pub fn phase_for(&self, delta_theta: f64) -> f64 {
        self.xi / self.hbar * delta_theta
    }

    /// Transverse precession angle `2(ξ/ħ)Δθ` for an angular sweep.
    pub fn rotation_for(&self, delta_theta: f64) -> f64 {
        2.0 * self.phase_for(delta_theta)
    }

    /// Angular sweep producing a transverse rotation `chi`.
    pub fn sweep_for_rotation(&self, chi: f64) -> Result<f64> {
        if self.xi == 0.0 {
            return Err(Error::Usage("xi = 0 produces no precession".into()));
        }
        Ok(chi * self.hbar / (2.0 * self.xi))
    }
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self::from_xi(1.0).expect("finite default")
    }
}
