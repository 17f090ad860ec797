// SPDX-License-Identifier: Apache-2.0

//! Slow-mode analysis of a Lindblad generator.
//!
//! Gives the asymptotic decay rate of an observable directly from the
//! spectrum of `L`, without integrating and fitting a time trace.

use nalgebra::linalg::Schur;
use nalgebra::DVector;
use num_complex::Complex64;

use super::liouvillian::{unvectorize, Liouvillian};
use super::operators::OperatorMatrix;
use super::LindbladError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRateOptions {
    /// Minimum normalized `|tr(O R_k)|` for eigenmode `R_k` to count.
    pub overlap_threshold: f64,
    /// Modes whose rates lie within this relative spacing of the slowest
    /// are considered degenerate.
    pub degeneracy_rtol: f64,
    /// Degenerate modes whose rates agree to this relative precision are
    /// the same rate (exact multiplicity or a conjugate pair), not an
    /// ambiguity.
    pub identical_rtol: f64,
    /// Eigenvalues below this fraction of the largest generator entry are
    /// treated as stationary.
    pub stationary_rtol: f64,
}

impl Default for DecayRateOptions {
    fn default() -> Self {
        Self {
            overlap_threshold: 1e-6,
            degeneracy_rtol: 1e-6,
            identical_rtol: 1e-9,
            stationary_rtol: 1e-10,
        }
    }
}

pub fn slowest_decay_rate(
    l: &Liouvillian,
    observable: &OperatorMatrix,
) -> Result<f64, LindbladError> {
    slowest_decay_rate_with(l, observable, &DecayRateOptions::default())
}

/// `−Re λ` of the slowest non-stationary eigenvalue of `l` whose right
/// eigenmode overlaps `observable`.
pub fn slowest_decay_rate_with(
    l: &Liouvillian,
    observable: &OperatorMatrix,
    opts: &DecayRateOptions,
) -> Result<f64, LindbladError> {
    let d = l.hilbert_dim();
    if observable.dim() != d {
        return Err(LindbladError::DimensionMismatch {
            expected: d,
            found: observable.dim(),
        });
    }
    let scale = l.max_abs_entry();
    if scale == 0.0 {
        return Err(LindbladError::NoOverlappingMode);
    }
    let m = l.matrix().map(|z| z / scale);
    let eigenvalues = Schur::new(m.clone())
        .eigenvalues()
        .ok_or(LindbladError::EigenDecompositionFailed)?;

    // tr(O R) = Σ_ij O_ij R_ji = vec(Oᵀ) · vec(R)
    let obs_t: Vec<Complex64> = observable.matrix().transpose().as_slice().to_vec();
    let obs_norm = observable.matrix().norm();

    let mut candidates: Vec<f64> = Vec::new();
    for lambda in eigenvalues.iter() {
        if lambda.norm() <= opts.stationary_rtol {
            continue;
        }
        let r = right_eigenvector(&m, *lambda, &obs_t)?;
        let rho = unvectorize(&r, d);
        let overlap = rho
            .transpose()
            .as_slice()
            .iter()
            .zip(observable.matrix().as_slice())
            .map(|(a, b)| a * b)
            .sum::<Complex64>()
            .norm()
            / (obs_norm * r.norm());
        if overlap > opts.overlap_threshold {
            candidates.push(-lambda.re * scale);
        }
    }
    if candidates.is_empty() {
        return Err(LindbladError::NoOverlappingMode);
    }
    candidates.sort_by(f64::total_cmp);
    let slowest = candidates[0];
    let cluster: Vec<f64> = candidates
        .iter()
        .copied()
        .take_while(|r| (r - slowest).abs() <= opts.degeneracy_rtol * slowest.abs())
        .collect();
    if cluster
        .iter()
        .any(|r| (r - slowest).abs() > opts.identical_rtol * slowest.abs())
    {
        return Err(LindbladError::DegenerateSlowModes {
            candidates: cluster,
        });
    }
    Ok(slowest)
}

/// Inverse iteration with a slightly perturbed shift.
fn right_eigenvector(
    m: &nalgebra::DMatrix<Complex64>,
    lambda: Complex64,
    seed: &[Complex64],
) -> Result<DVector<Complex64>, LindbladError> {
    let n = m.nrows();
    let shift = lambda + Complex64::new(1e-11, 1e-11) * (1.0 + lambda.norm());
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] -= shift;
    }
    let lu = a.lu();
    let mut x = DVector::from_fn(n, |i, _| {
        seed[i] + Complex64::new(1e-3 * ((i % 7) as f64 + 1.0), 1e-3 * ((i % 5) as f64))
    });
    for _ in 0..3 {
        x = lu
            .solve(&x)
            .ok_or(LindbladError::EigenDecompositionFailed)?;
        let nrm = x.norm();
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(LindbladError::EigenDecompositionFailed);
        }
        x /= Complex64::new(nrm, 0.0);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::liouvillian::build_liouvillian;
    use crate::lindblad::operators::{build_operators, HilbertConfig, Level};

    #[test]
    fn empty_cavity_rate_is_two_kappa() {
        let kappa = 2.0 * std::f64::consts::PI * 320e6;
        let cfg = HilbertConfig::new(1);
        let ops = build_operators(cfg);
        let l = build_liouvillian(
            &OperatorMatrix::zeros(cfg.dim()),
            &[ops.a.scaled((2.0 * kappa).sqrt())],
        )
        .unwrap();
        let rate = slowest_decay_rate(&l, &ops.number).unwrap();
        assert!((rate / (2.0 * kappa) - 1.0).abs() < 1e-9, "rate {rate}");
    }

    /// S and D each decay into E at rates r and 3r (population rates).
    fn two_channel(r: f64, ratio: f64) -> (Liouvillian, OperatorMatrix, OperatorMatrix) {
        let cfg = HilbertConfig::new(0);
        let ops = build_operators(cfg);
        let l = build_liouvillian(
            &OperatorMatrix::zeros(3),
            &[
                ops.transition(Level::E, Level::S).scaled(r.sqrt()),
                ops.transition(Level::E, Level::D)
                    .scaled((ratio * r).sqrt()),
            ],
        )
        .unwrap();
        (l, ops.projector(Level::S), ops.projector(Level::D))
    }

    #[test]
    fn block_diagonal_channels() {
        let r = 1.7e4;
        let (l, slow, fast) = two_channel(r, 3.0);
        let rate = slowest_decay_rate(&l, &slow).unwrap();
        assert!((rate / r - 1.0).abs() < 1e-9);
        let rate = slowest_decay_rate(&l, &fast).unwrap();
        assert!((rate / (3.0 * r) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn near_degenerate_modes_are_an_error() {
        let cfg = HilbertConfig::new(0);
        let ops = build_operators(cfg);
        let r: f64 = 1.0e3;
        let l = build_liouvillian(
            &OperatorMatrix::zeros(3),
            &[
                ops.transition(Level::E, Level::S).scaled(r.sqrt()),
                ops.transition(Level::E, Level::D)
                    .scaled((r * (1.0 + 1e-7)).sqrt()),
            ],
        )
        .unwrap();
        let obs = &ops.projector(Level::S) + &ops.projector(Level::D);
        match slowest_decay_rate(&l, &obs) {
            Err(LindbladError::DegenerateSlowModes { candidates }) => {
                assert_eq!(candidates.len(), 2)
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
