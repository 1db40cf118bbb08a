use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{c, Ket, Tensor, I, ONE, TOL, ZERO};
use crate::error::{Error, Result};

/// Dense square complex matrix acting on a `dim`-dimensional Hilbert space.
///
/// The arithmetic operator impls (`+`, `-`, `*`) panic on dimension mismatch;
/// use [`Operator::checked_mul`] or [`commutator`] when dimensions are not
/// known to agree.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: DMatrix<Complex64>,
}

impl Operator {
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "operator must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Usage("operator has non-finite entries".into()));
        }
        Ok(Self { m })
    }

    /// Builds a `dim × dim` operator from row-major entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        Self {
            m: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)),
        }
    }

    pub fn sigma_x() -> Self {
        Self {
            m: DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        }
    }

    pub fn sigma_y() -> Self {
        Self {
            m: DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        }
    }

    pub fn sigma_z() -> Self {
        Self {
            m: DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    }

    /// `n̂ · σ⃗` for a real (not necessarily unit) vector.
    pub fn spin_along(n: [f64; 3]) -> Self {
        Self {
            m: DMatrix::from_row_slice(
                2,
                2,
                &[c(n[2], 0.0), c(n[0], -n[1]), c(n[0], n[1]), c(-n[2], 0.0)],
            ),
        }
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn projector(ket: &Ket) -> Self {
        let v = ket.as_vector();
        Self { m: v * v.adjoint() }
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

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            m: &self.m * factor,
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(c(factor, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn checked_mul(&self, rhs: &Operator) -> Result<Operator> {
        self.same_dim(rhs, "product")?;
        Ok(Self { m: &self.m * &rhs.m })
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        if ket.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "operator of dim {} applied to ket of dim {}",
                self.dim(),
                ket.dim()
            )));
        }
        Ok(Ket::from_vector(&self.m * ket.as_vector()))
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff: dimension mismatch");
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.max_abs_diff(&self.adjoint()) <= TOL
    }

    pub fn is_unitary(&self) -> bool {
        let prod = Self {
            m: self.m.adjoint() * &self.m,
        };
        prod.max_abs_diff(&Self::identity(self.dim())) <= TOL
    }

    /// Eigenvalues (ascending) and eigenvectors of a Hermitian operator.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        if !self.is_hermitian() {
            return Err(Error::Usage("operator is not Hermitian".into()));
        }
        // Symmetrize so round-off does not leak into the decomposition.
        let h = (&self.m + self.m.adjoint()) * c(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |r, col| {
            eig.eigenvectors[(r, order[col])]
        });
        Ok((values, vectors))
    }

    /// Applies `f` to the spectrum of a Hermitian operator.
    pub(crate) fn spectral_map(&self, f: impl Fn(f64) -> Complex64) -> Result<Operator> {
        let (values, vectors) = self.hermitian_eigen()?;
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| f(v)),
        ));
        Ok(Self {
            m: &vectors * diag * vectors.adjoint(),
        })
    }

    fn same_dim(&self, rhs: &Operator, what: &str) -> Result<()> {
        if self.dim() != rhs.dim() {
            return Err(Error::Dimension(format!(
                "{what} of operators with dims {} and {}",
                self.dim(),
                rhs.dim()
            )));
        }
        Ok(())
    }
}

impl Tensor for Operator {
    fn tensor(&self, rhs: &Self) -> Self {
        Self {
            m: self.m.kronecker(&rhs.m),
        }
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator product: dimension mismatch");
        Operator { m: &self.m * &rhs.m }
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator sum: dimension mismatch");
        Operator { m: &self.m + &rhs.m }
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator difference: dimension mismatch");
        Operator { m: &self.m - &rhs.m }
    }
}

/// `exp(−i · scale · A)` for Hermitian `A`, computed from its spectral
/// decomposition.
pub fn hermitian_exp(a: &Operator, scale: f64) -> Result<Operator> {
    if !scale.is_finite() {
        return Err(Error::Usage(format!("non-finite exponent scale {scale}")));
    }
    a.spectral_map(|lambda| Complex64::from_polar(1.0, -scale * lambda))
}

/// `AB − BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.same_dim(b, "commutator")?;
    Ok(Operator {
        m: &a.m * &b.m - &b.m * &a.m,
    })
}
