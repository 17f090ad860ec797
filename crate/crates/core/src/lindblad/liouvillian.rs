// SPDX-License-Identifier: Apache-2.0

//! Lindblad generator as a dense superoperator on column-stacked density
//! matrices.
//!
//! With `vec(ρ)` stacking columns, `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`, so
//!
//! ```text
//! L = −i (I ⊗ H − Hᵀ ⊗ I)
//!     + Σ_k [ C̄_k ⊗ C_k − ½ I ⊗ C_k†C_k − ½ (C_k†C_k)ᵀ ⊗ I ]
//! ```

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::operators::{CMatrix, OperatorMatrix};
use super::LindbladError;

/// Column-stacking vectorization. nalgebra stores matrices column-major,
/// so this is a plain copy of the storage.
pub fn vectorize(rho: &CMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(rho.as_slice())
}

pub fn unvectorize(v: &DVector<Complex64>, dim: usize) -> CMatrix {
    assert_eq!(v.len(), dim * dim, "vector length is not dim²");
    DMatrix::from_column_slice(dim, dim, v.as_slice())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    matrix: CMatrix,
    dim: usize,
}

impl Liouvillian {
    /// Wraps an arbitrary `d² × d²` superoperator.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self, LindbladError> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(LindbladError::NotSquare {
                rows: n,
                cols: matrix.ncols(),
            });
        }
        let dim = (n as f64).sqrt().round() as usize;
        if dim * dim != n {
            return Err(LindbladError::DimensionMismatch {
                expected: dim * dim,
                found: n,
            });
        }
        Ok(Self { matrix, dim })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Hilbert-space dimension `d` (the superoperator is `d² × d²`).
    pub fn hilbert_dim(&self) -> usize {
        self.dim
    }

    /// `dρ/dt` for a density matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * vectorize(rho)), self.dim)
    }

    /// Largest `|d tr(ρ)/dt|` coefficient: `max_j |Σ_i L[(ii), j]|`.
    /// Zero for a trace-preserving generator.
    pub fn trace_drift(&self) -> f64 {
        let d = self.dim;
        (0..d * d)
            .map(|col| {
                (0..d)
                    .map(|i| self.matrix[(i + i * d, col)])
                    .sum::<Complex64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest magnitude among the diagonal entries, i.e. the fastest
    /// single-element relaxation or rotation rate.
    pub fn fastest_rate(&self) -> f64 {
        self.matrix
            .diagonal()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn build_liouvillian(
    h: &OperatorMatrix,
    collapses: &[OperatorMatrix],
) -> Result<Liouvillian, LindbladError> {
    let d = h.dim();
    for c in collapses {
        if c.dim() != d {
            return Err(LindbladError::DimensionMismatch {
                expected: d,
                found: c.dim(),
            });
        }
    }
    let err = h.hermiticity_error();
    if err > super::operators::HERMITIAN_RTOL {
        return Err(LindbladError::NonHermitian { error: err });
    }

    let id = CMatrix::identity(d, d);
    let minus_i = Complex64::new(0.0, -1.0);
    let hm = h.matrix();
    let mut l = (id.kronecker(hm) - hm.transpose().kronecker(&id)) * minus_i;
    for c in collapses {
        let cm = c.matrix();
        let cdc = cm.adjoint() * cm;
        l += cm.conjugate().kronecker(cm);
        l -= id.kronecker(&cdc) * Complex64::new(0.5, 0.0);
        l -= cdc.transpose().kronecker(&id) * Complex64::new(0.5, 0.0);
    }
    Ok(Liouvillian { matrix: l, dim: d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::operators::{build_operators, HilbertConfig, Level};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vectorization_round_trip_is_column_stacking() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(3.0, -1.0), c(4.0, 0.0)]);
        let v = vectorize(&m);
        // column-stacked: (0,0), (1,0), (0,1), (1,1)
        assert_eq!(v[1], c(3.0, -1.0));
        assert_eq!(v[2], c(2.0, 1.0));
        assert_eq!(unvectorize(&v, 2), m);
    }

    /// Direct evaluation of the Lindblad right-hand side.
    fn lindblad_rhs(h: &CMatrix, cs: &[CMatrix], rho: &CMatrix) -> CMatrix {
        let mut out = (h * rho - rho * h) * c(0.0, -1.0);
        for ck in cs {
            let cdc = ck.adjoint() * ck;
            out += ck * rho * ck.adjoint() - (&cdc * rho + rho * &cdc) * c(0.5, 0.0);
        }
        out
    }

    #[test]
    fn superoperator_matches_direct_rhs() {
        let cfg = HilbertConfig::new(1);
        let ops = build_operators(cfg);
        let h = &(&ops.transition(Level::E, Level::S) + &ops.transition(Level::S, Level::E))
            .scaled(0.7)
            + &ops.number.scaled(0.3);
        let cs = vec![
            ops.transition(Level::S, Level::E).scaled(0.4),
            ops.a.scaled(1.1),
        ];
        let l = build_liouvillian(&h, &cs).unwrap();
        let d = cfg.dim();
        let rho = DMatrix::from_fn(d, d, |i, j| {
            c((i + 2 * j) as f64 * 0.01, (i as f64 - j as f64) * 0.02)
        });
        let direct = lindblad_rhs(
            h.matrix(),
            &cs.iter().map(|o| o.matrix().clone()).collect::<Vec<_>>(),
            &rho,
        );
        let via_l = l.apply(&rho);
        assert!((direct - via_l).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn empty_cavity_photon_decay_rate() {
        let kappa: f64 = 2.5;
        let cfg = HilbertConfig::new(1);
        let ops = build_operators(cfg);
        let l = build_liouvillian(
            &OperatorMatrix::zeros(cfg.dim()),
            &[ops.a.scaled((2.0 * kappa).sqrt())],
        )
        .unwrap();
        let rho = ops.basis_projector(Level::S, 1).into_matrix();
        let drho = l.apply(&rho);
        let dn = (ops.number.matrix() * drho).trace().re;
        let n = (ops.number.matrix() * rho).trace().re;
        assert!((dn + 2.0 * kappa * n).abs() < 1e-12);
        assert!(l.trace_drift() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let r = build_liouvillian(&OperatorMatrix::zeros(3), &[OperatorMatrix::zeros(6)]);
        assert!(matches!(r, Err(LindbladError::DimensionMismatch { .. })));
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        let ops = build_operators(HilbertConfig::new(0));
        let r = build_liouvillian(&ops.transition(Level::E, Level::S), &[]);
        assert!(matches!(r, Err(LindbladError::NonHermitian { .. })));
    }
}
