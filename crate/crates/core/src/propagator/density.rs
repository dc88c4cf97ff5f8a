use nalgebra::Vector4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat4};

/// Hermiticity tolerance for validated inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for validated inputs.
pub const TRACE_TOL: f64 = 1e-9;
/// Most negative eigenvalue accepted as discretization noise.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-8;

/// Two-dot density matrix in the `(00, X0, 0X, XX)` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMat4);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: CMat4) -> Result<Self> {
        let herm = linalg::max_abs(&(m - m.adjoint()));
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max |ρ - ρ†| = {herm:.3e})"
            )));
        }
        let tr = linalg::trace(&m);
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let rho = Self(m);
        let min = rho.min_eigenvalue();
        if min < -NEGATIVE_EIGEN_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(rho)
    }

    /// Wraps a propagated matrix without validation. Trace and positivity are
    /// monitored by the caller.
    pub fn from_matrix_unchecked(m: CMat4) -> Self {
        Self(m)
    }

    /// Projector onto a normalized pure state.
    pub fn pure(psi: &Vector4<Complex64>) -> Self {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let psi = psi / Complex64::new(norm2.sqrt(), 0.0);
        Self(psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.0
    }

    pub fn into_matrix(self) -> CMat4 {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.0)
    }

    pub fn trace_error(&self) -> f64 {
        (self.trace() - Complex64::new(1.0, 0.0)).norm()
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(self.0 * self.0)).re
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::max_abs(&(self.0 - self.0.adjoint()))
    }

    pub fn eigenvalues(&self) -> Vector4<f64> {
        linalg::hermitian_eigenvalues(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Largest entry-wise modulus of the difference.
    pub fn linf_distance(&self, other: &DensityMatrix) -> f64 {
        linalg::max_abs(&(self.0 - other.0))
    }

    pub fn transformed(&self, u: &CMat4) -> DensityMatrix {
        Self(u * self.0 * u.adjoint())
    }
}
