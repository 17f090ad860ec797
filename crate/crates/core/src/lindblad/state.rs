// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use super::operators::{CMatrix, HilbertConfig, Level};
use super::LindbladError;

pub const TRACE_TOL: f64 = 1e-8;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Density matrix on the atom ⊗ cavity space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: CMatrix,
    basis: HilbertConfig,
}

impl DensityState {
    /// Pure product state `|level, n⟩⟨level, n|`.
    pub fn basis_state(basis: HilbertConfig, level: Level, n: usize) -> Self {
        assert!(n <= basis.n_max(), "photon number above cutoff");
        let d = basis.dim();
        let mut matrix = CMatrix::zeros(d, d);
        let i = basis.basis_index(level, n);
        matrix[(i, i)] = Complex64::new(1.0, 0.0);
        Self { matrix, basis }
    }

    /// Validates trace, Hermiticity and positivity.
    pub fn new(matrix: CMatrix, basis: HilbertConfig) -> Result<Self, LindbladError> {
        let state = Self::new_unchecked(matrix, basis)?;
        state.validate()?;
        Ok(state)
    }

    /// Only checks the shape. Used for intermediate integrator output.
    pub fn new_unchecked(matrix: CMatrix, basis: HilbertConfig) -> Result<Self, LindbladError> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(LindbladError::DimensionMismatch {
                expected: basis.dim(),
                found: matrix.nrows(),
            });
        }
        Ok(Self { matrix, basis })
    }

    pub fn validate(&self) -> Result<(), LindbladError> {
        let trace_error = self.trace_error();
        let hermiticity_error = self.hermiticity_error();
        let min_eigenvalue = self.min_eigenvalue();
        if trace_error > TRACE_TOL
            || hermiticity_error > HERMITIAN_TOL
            || min_eigenvalue < -POSITIVITY_TOL
        {
            return Err(LindbladError::InvalidState {
                trace_error,
                hermiticity_error,
                min_eigenvalue,
            });
        }
        Ok(())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> HilbertConfig {
        self.basis
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `|tr ρ − 1|`, including any imaginary part.
    pub fn trace_error(&self) -> f64 {
        (self.trace() - Complex64::new(1.0, 0.0)).norm()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part of ρ.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Population of an atomic level, summed over photon number.
    pub fn population(&self, level: Level) -> f64 {
        (0..self.basis.photon_dim())
            .map(|n| {
                let i = self.basis.basis_index(level, n);
                self.matrix[(i, i)].re
            })
            .sum()
    }

    pub fn photon_number(&self) -> f64 {
        let pd = self.basis.photon_dim();
        (0..self.basis.dim())
            .map(|i| (i % pd) as f64 * self.matrix[(i, i)].re)
            .sum()
    }

    /// Expectation value `tr(O ρ)`.
    pub fn expectation(&self, observable: &CMatrix) -> Complex64 {
        (observable * &self.matrix).trace()
    }
}
