use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qlinalg::{DensityMatrix, Ket, Operator, TOL};

/// Gaussian von Neumann pointer: shift `strength` (g) per unit eigenvalue,
/// standard deviation `width` (Δ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointerParams {
    strength: f64,
    width: f64,
}

/// Resolution regarded as a strong (effectively projective) measurement.
pub const STRONG_RESOLUTION: f64 = 10.0;

impl PointerParams {
    pub fn new(strength: f64, width: f64) -> Result<Self> {
        if !(strength >= 0.0 && strength.is_finite()) {
            return Err(Error::Usage(format!("pointer strength must be ≥ 0, got {strength}")));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::Usage(format!("pointer width must be > 0, got {width}")));
        }
        Ok(Self { strength, width })
    }

    /// Unit-width pointer with resolution `s = g/Δ`.
    pub fn with_resolution(s: f64) -> Result<Self> {
        Self::new(s, 1.0)
    }

    pub fn strong() -> Self {
        Self::with_resolution(STRONG_RESOLUTION).expect("valid constant")
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// `s = g/Δ`.
    pub fn resolution(&self) -> f64 {
        self.strength / self.width
    }

    /// Averaged damping `e^{−s²/2}` of coherences between the ±1 eigenspaces.
    pub fn dephasing_factor(&self) -> f64 {
        (-0.5 * self.resolution().powi(2)).exp()
    }
}

/// Anything that can be turned into a density matrix.
pub trait ToDensity {
    fn to_density(&self) -> Result<DensityMatrix>;
}

impl ToDensity for DensityMatrix {
    fn to_density(&self) -> Result<DensityMatrix> {
        Ok(self.clone())
    }
}

impl ToDensity for Ket {
    fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_ket(self)
    }
}

/// Result of a single selective pointer measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerReading {
    pub readout: f64,
    pub post: DensityMatrix,
}

/// Eigenprojectors `(P₊, P₋) = ((I ± A)/2)` of an observable with spectrum ±1.
pub(crate) fn eigenprojectors(a: &Operator) -> Result<(Operator, Operator)> {
    if !a.is_hermitian() {
        return Err(Error::Usage("measured observable must be Hermitian".into()));
    }
    let id = Operator::identity(a.dim());
    if (a * a).max_abs_diff(&id) > 1e-10 {
        return Err(Error::Usage(
            "measured observable must have eigenvalues ±1".into(),
        ));
    }
    Ok(((&id + a).scale_re(0.5), (&id - a).scale_re(0.5)))
}

fn check_dims(state: &DensityMatrix, a: &Operator) -> Result<()> {
    if state.dim() != a.dim() {
        return Err(Error::Dimension(format!(
            "observable of dim {} measured on state of dim {}",
            a.dim(),
            state.dim()
        )));
    }
    Ok(())
}

/// Kraus operator `K(q) ∝ exp(−(q − gA)²/4Δ²)`, up to a positive scale.
fn kraus(plus: &Operator, minus: &Operator, p: &PointerParams, readout: f64) -> Operator {
    let g = p.strength;
    let d2 = 4.0 * p.width * p.width;
    let ep = -(readout - g).powi(2) / d2;
    let em = -(readout + g).powi(2) / d2;
    let top = ep.max(em);
    &plus.scale_re((ep - top).exp()) + &minus.scale_re((em - top).exp())
}

fn branch_weights(state: &DensityMatrix, plus: &Operator) -> f64 {
    (state.matrix() * plus.matrix()).trace().re.clamp(0.0, 1.0)
}

/// Post-measurement state for a given readout `q`.
pub fn pointer_update(
    state: &DensityMatrix,
    a: &Operator,
    p: &PointerParams,
    readout: f64,
) -> Result<DensityMatrix> {
    check_dims(state, a)?;
    if p.strength == 0.0 {
        return Ok(state.clone());
    }
    let (plus, minus) = eigenprojectors(a)?;
    let k = kraus(&plus, &minus, p, readout);
    DensityMatrix::from_unnormalized(state.sandwich(&k))
}

/// Density of the readout distribution `Σ_± p_± N(q; ±g, Δ²)`.
pub fn readout_density(state: &DensityMatrix, a: &Operator, p: &PointerParams, q: f64) -> Result<f64> {
    check_dims(state, a)?;
    let (plus, _) = eigenprojectors(a)?;
    let pp = branch_weights(state, &plus);
    let norm = |mean: f64| {
        let z = (q - mean) / p.width;
        (-0.5 * z * z).exp() / (p.width * (2.0 * std::f64::consts::PI).sqrt())
    };
    Ok(pp * norm(p.strength) + (1.0 - pp) * norm(-p.strength))
}

/// Selective measurement of `A` (eigenvalues ±1) with a Gaussian pointer.
pub fn pointer_measure<S: ToDensity + ?Sized, R: Rng + ?Sized>(
    state: &S,
    a: &Operator,
    p: &PointerParams,
    rng: &mut R,
) -> Result<PointerReading> {
    let state = state.to_density()?;
    check_dims(&state, a)?;
    let (plus, minus) = eigenprojectors(a)?;
    let p_plus = branch_weights(&state, &plus);
    let branch = if rng.random::<f64>() < p_plus { 1.0 } else { -1.0 };
    let noise: f64 = rng.sample(StandardNormal);
    let readout = branch * p.strength + p.width * noise;
    if p.strength == 0.0 {
        return Ok(PointerReading { readout, post: state });
    }
    let k = kraus(&plus, &minus, p, readout);
    let post = DensityMatrix::from_unnormalized(state.sandwich(&k))?;
    Ok(PointerReading { readout, post })
}

/// Non-selective measurement channel: coherences between the ±1 eigenspaces
/// of `A` shrink by `e^{−s²/2}`.
pub fn dephase(state: &DensityMatrix, a: &Operator, p: &PointerParams) -> Result<DensityMatrix> {
    check_dims(state, a)?;
    let (plus, minus) = eigenprojectors(a)?;
    let rho = state.matrix();
    let (pp, pm) = (plus.matrix(), minus.matrix());
    let f = Complex64::new(p.dephasing_factor(), 0.0);
    let m: DMatrix<Complex64> =
        pp * rho * pp + pm * rho * pm + (pp * rho * pm + pm * rho * pp) * f;
    let out = DensityMatrix::from_unnormalized(m)?;
    if (out.trace().re - 1.0).abs() > TOL {
        return Err(Error::Numerical("dephasing channel lost trace".into()));
    }
    Ok(out)
}

/// Binary assignment of a readout; the tie at 0 goes to +1.
pub fn binary_outcome(readout: f64) -> i8 {
    if readout >= 0.0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::expectation;
    use crate::rng::{run_trials, StreamTag};

    #[test]
    fn zero_strength_is_identity() {
        let rho = DensityMatrix::from_bloch([0.3, 0.1, -0.6]).unwrap();
        let p = PointerParams::new(0.0, 1.0).unwrap();
        let readouts = run_trials(2000, 3, StreamTag(0), |_, rng| {
            let r = pointer_measure(&rho, &Operator::sigma_x(), &p, rng).unwrap();
            assert_eq!(r.post, rho);
            r.readout
        });
        let (mean, se) = crate::rng::mean_stderr(&readouts);
        assert!(mean.abs() < 4.0 * se);
        assert!(dephase(&rho, &Operator::sigma_x(), &p).unwrap().as_operator().max_abs_diff(&rho.as_operator()) <= 1e-12);
    }

    #[test]
    fn eigenstate_is_undisturbed() {
        let p = PointerParams::with_resolution(50.0).unwrap();
        let px = DensityMatrix::from_ket(&Ket::plus_x()).unwrap();
        let readouts = run_trials(500, 1, StreamTag(0), |_, rng| {
            let r = pointer_measure(&Ket::plus_x(), &Operator::sigma_x(), &p, rng).unwrap();
            assert!(r.post.as_operator().max_abs_diff(&px.as_operator()) < 1e-12);
            r.readout
        });
        assert!(readouts.iter().all(|q| (q - 50.0).abs() < 6.0));
    }

    #[test]
    fn unit_resolution_dephasing_monte_carlo() {
        // ⟨σ_z⟩ after a non-selective σ_x measurement of |0⟩ is e^{−1/2}.
        let p = PointerParams::with_resolution(1.0).unwrap();
        let up = DensityMatrix::from_ket(&Ket::spin_up()).unwrap();
        let analytic = dephase(&up, &Operator::sigma_x(), &p).unwrap();
        let oracle = (-0.5f64).exp();
        assert!((analytic.bloch().unwrap()[2] - oracle).abs() < 1e-12);
        let z = run_trials(40_000, 11, StreamTag(0), |_, rng| {
            let r = pointer_measure(&up, &Operator::sigma_x(), &p, rng).unwrap();
            expectation(&Operator::sigma_z(), &r.post).unwrap().re
        });
        let (mean, se) = crate::rng::mean_stderr(&z);
        assert!((mean - oracle).abs() < 4.0 * se, "{mean} vs {oracle} ± {se}");
        // selective post-states are pure for pure input
        assert!((pointer_update(&up, &Operator::sigma_x(), &p, 0.3).unwrap().purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn readout_density_integrates_to_one() {
        let p = PointerParams::new(2.0, 0.7).unwrap();
        let rho = DensityMatrix::from_bloch([0.2, 0.0, 0.5]).unwrap();
        let h = 1e-3;
        let total: f64 = (-12000..12000)
            .map(|k| readout_density(&rho, &Operator::sigma_x(), &p, k as f64 * h).unwrap() * h)
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_observables() {
        let p = PointerParams::strong();
        let rho = DensityMatrix::maximally_mixed(2);
        let mut rng = crate::rng::trial_rng(0, StreamTag(0), 0);
        let twice = Operator::sigma_x().scale_re(2.0);
        assert!(pointer_measure(&rho, &twice, &p, &mut rng).is_err());
        let skew = Operator::sigma_x().scale(Complex64::new(0.0, 1.0));
        assert!(pointer_measure(&rho, &skew, &p, &mut rng).is_err());
        assert!(pointer_measure(&rho, &Operator::identity(4), &p, &mut rng).is_err());
        assert!(PointerParams::new(-1.0, 1.0).is_err());
        assert!(PointerParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn tie_goes_to_plus() {
        assert_eq!(binary_outcome(0.0), 1);
        assert_eq!(binary_outcome(-1e-300), -1);
    }
}
