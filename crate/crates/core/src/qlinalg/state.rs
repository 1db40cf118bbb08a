use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{c, Operator, Tensor, EIGEN_FLOOR, ONE, TOL, ZERO};
use crate::error::{Error, Result};

/// Pure state as a column of complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: DVector<Complex64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Dimension("ket must have positive dimension".into()));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Usage("ket has non-finite amplitudes".into()));
        }
        Ok(Self {
            amps: DVector::from_vec(amplitudes),
        })
    }

    pub(crate) fn from_vector(amps: DVector<Complex64>) -> Self {
        Self { amps }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Dimension(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = ONE;
        Ok(Self { amps })
    }

    /// σ_z = +1 eigenstate `|0⟩`.
    pub fn spin_up() -> Self {
        Self::basis(2, 0).expect("valid basis index")
    }

    /// σ_z = −1 eigenstate `|1⟩`.
    pub fn spin_down() -> Self {
        Self::basis(2, 1).expect("valid basis index")
    }

    /// σ_x = +1 eigenstate `(|0⟩ + |1⟩)/√2`.
    pub fn plus_x() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_vector(DVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]))
    }

    /// σ_x = −1 eigenstate.
    pub fn minus_x() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_vector(DVector::from_vec(vec![c(h, 0.0), c(-h, 0.0)]))
    }

    /// σ_y = +1 eigenstate.
    pub fn plus_y() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_vector(DVector::from_vec(vec![c(h, 0.0), c(0.0, h)]))
    }

    /// Spin coherent state pointing along the Bloch angles `(polar, azimuth)`.
    pub fn spin_coherent(polar: f64, azimuth: f64) -> Self {
        Self::from_vector(DVector::from_vec(vec![
            c((polar / 2.0).cos(), 0.0),
            Complex64::from_polar((polar / 2.0).sin(), azimuth),
        ]))
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::Usage("cannot normalize the zero vector".into()));
        }
        Ok(Self {
            amps: &self.amps / c(n, 0.0),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "inner product of kets with dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            amps: &self.amps * factor,
        }
    }
}

impl Tensor for Ket {
    fn tensor(&self, rhs: &Self) -> Self {
        Self {
            amps: self.amps.kronecker(&rhs.amps),
        }
    }
}

/// Mixed state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants. Violations are numerical
    /// contract errors.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("density matrix has non-finite entries".into()));
        }
        let op = Operator::from_matrix(m)?;
        if !op.is_hermitian() {
            return Err(Error::Numerical(format!(
                "density matrix not Hermitian (max |ρ − ρ†| = {:e})",
                op.max_abs_diff(&op.adjoint())
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::Numerical(format!("density matrix trace is {tr}")));
        }
        let (values, _) = op.hermitian_eigen()?;
        if values[0] < EIGEN_FLOOR {
            return Err(Error::Numerical(format!(
                "density matrix has negative eigenvalue {:e}",
                values[0]
            )));
        }
        Ok(Self {
            m: op.into_matrix(),
        })
    }

    /// Builds `ρ/Tr ρ` from an unnormalized positive operator, symmetrizing
    /// away round-off.
    pub(crate) fn from_unnormalized(m: DMatrix<Complex64>) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > 0.0) {
            return Err(Error::Numerical(format!(
                "cannot normalize operator with trace {tr}"
            )));
        }
        let h = (&m + m.adjoint()) * c(0.5 / tr, 0.0);
        Self::new(h)
    }

    pub fn from_ket(ket: &Ket) -> Result<Self> {
        let k = ket.normalized()?;
        let v = k.as_vector();
        Ok(Self { m: v * v.adjoint() })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0),
        }
    }

    /// Qubit state `(I + b⃗·σ⃗)/2`; requires `|b⃗| ≤ 1`.
    pub fn from_bloch(b: [f64; 3]) -> Result<Self> {
        let len = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        if len > 1.0 + 1e-12 {
            return Err(Error::Usage(format!("Bloch vector length {len} exceeds 1")));
        }
        let s = Operator::spin_along(b);
        let m = (DMatrix::identity(2, 2) + s.matrix()) * c(0.5, 0.0);
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn as_operator(&self) -> Operator {
        Operator::from_matrix(self.m.clone()).expect("density matrix is square")
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)` of a qubit state.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::Dimension(format!(
                "Bloch vector needs a qubit, got dim {}",
                self.dim()
            )));
        }
        let off = self.m[(1, 0)];
        Ok([
            2.0 * off.re,
            2.0 * off.im,
            (self.m[(0, 0)] - self.m[(1, 1)]).re,
        ])
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.as_operator()
            .hermitian_eigen()
            .expect("density matrix is Hermitian")
            .0
    }

    /// `U ρ U†`.
    pub fn evolve(&self, u: &Operator) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "evolution of dim-{} state by dim-{} operator",
                self.dim(),
                u.dim()
            )));
        }
        let m = u.matrix() * &self.m * u.matrix().adjoint();
        Ok(Self {
            m: (&m + m.adjoint()) * c(0.5, 0.0),
        })
    }

    /// `K ρ K†` without normalization.
    pub(crate) fn sandwich(&self, k: &Operator) -> DMatrix<Complex64> {
        k.matrix() * &self.m * k.matrix().adjoint()
    }

    /// Convex mixture `Σ wᵢ ρᵢ` of equally sized states.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Usage("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::Dimension("mixture of unequal dimensions".into()));
            }
            m += rho.matrix() * c(*w, 0.0);
        }
        Self::from_unnormalized(m)
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, rhs: &Self) -> Self {
        Self {
            m: self.m.kronecker(&rhs.m),
        }
    }
}

/// Anything an expectation value can be taken on.
pub trait QuantumState {
    fn dim(&self) -> usize;
    /// `⟨ψ|A|ψ⟩` or `Tr(ρA)`, assuming dimensions agree.
    fn expectation_unchecked(&self, a: &Operator) -> Complex64;
}

impl QuantumState for Ket {
    fn dim(&self) -> usize {
        Ket::dim(self)
    }
    fn expectation_unchecked(&self, a: &Operator) -> Complex64 {
        self.amps.dotc(&(a.matrix() * &self.amps))
    }
}

impl QuantumState for DensityMatrix {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }
    fn expectation_unchecked(&self, a: &Operator) -> Complex64 {
        (&self.m * a.matrix()).trace()
    }
}

pub fn expectation<S: QuantumState>(a: &Operator, state: &S) -> Result<Complex64> {
    if a.dim() != state.dim() {
        return Err(Error::Dimension(format!(
            "expectation of dim-{} operator in dim-{} state",
            a.dim(),
            state.dim()
        )));
    }
    Ok(state.expectation_unchecked(a))
}

/// Traces out every factor except `keep`.
pub fn partial_trace(rho: &DensityMatrix, factor_dims: &[usize], keep: usize) -> Result<DensityMatrix> {
    let total: usize = factor_dims.iter().product();
    if factor_dims.is_empty() || factor_dims.contains(&0) || total != rho.dim() {
        return Err(Error::Dimension(format!(
            "factor dims {factor_dims:?} do not multiply to {}",
            rho.dim()
        )));
    }
    if keep >= factor_dims.len() {
        return Err(Error::Dimension(format!(
            "keep index {keep} out of range for {} factors",
            factor_dims.len()
        )));
    }
    let kept = factor_dims[keep];
    let inner: usize = factor_dims[keep + 1..].iter().product();
    let outer: usize = factor_dims[..keep].iter().product();
    let mut out = DMatrix::from_element(kept, kept, ZERO);
    for o in 0..outer {
        for n in 0..inner {
            for a in 0..kept {
                let row = (o * kept + a) * inner + n;
                for b in 0..kept {
                    let col = (o * kept + b) * inner + n;
                    out[(a, b)] += rho.m[(row, col)];
                }
            }
        }
    }
    Ok(DensityMatrix { m: out })
}

fn hermitian_sqrt(rho: &DensityMatrix) -> Operator {
    rho.as_operator()
        .spectral_map(|v| c(v.max(0.0).sqrt(), 0.0))
        .expect("density matrix is Hermitian")
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension("fidelity of unequal dimensions".into()));
    }
    let s = hermitian_sqrt(rho);
    let inner = s.matrix() * sigma.matrix() * s.matrix();
    let inner = Operator::from_matrix((&inner + inner.adjoint()) * c(0.5, 0.0))?;
    let (values, _) = inner.hermitian_eigen()?;
    let root: f64 = values.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((root * root).min(1.0))
}

/// Trace distance `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension("trace distance of unequal dimensions".into()));
    }
    let diff = Operator::from_matrix(&rho.m - &sigma.m)?;
    let (values, _) = diff.hermitian_eigen()?;
    Ok(0.5 * values.iter().map(|v| v.abs()).sum::<f64>())
}
