//! Dense complex linear algebra on small composite Hilbert spaces.
//!
//! Everything here is sized for spin ⊗ path ⊗ ancilla problems (dimension at
//! most 16), so storage is a plain dense `nalgebra` matrix. Composite spaces
//! use the left-factor-most-significant basis ordering: for `a ⊗ b` the basis
//! index is `i_a * dim(b) + i_b`.

mod operator;
mod state;

pub use operator::{commutator, hermitian_exp, Operator};
pub use state::{
    expectation, fidelity, partial_trace, trace_distance, DensityMatrix, Ket, QuantumState,
};

use num_complex::Complex64;

/// Tolerance for hermiticity, unitarity and normalization checks.
pub const TOL: f64 = 1e-12;

/// Smallest eigenvalue still accepted for a density matrix.
pub const EIGEN_FLOOR: f64 = -1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Kronecker product, left factor most significant.
pub trait Tensor: Sized {
    fn tensor(&self, rhs: &Self) -> Self;
}

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
