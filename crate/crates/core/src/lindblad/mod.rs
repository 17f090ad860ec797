// SPDX-License-Identifier: Apache-2.0

//! Operator algebra and Lindblad master-equation evolution on small,
//! dense Hilbert spaces.

mod evolve;
mod liouvillian;
mod operators;
mod spectrum;
mod state;

pub use evolve::{evolve, propagate, EvolutionDiagnostics, EvolveOptions, Trajectory};
pub use liouvillian::{build_liouvillian, unvectorize, vectorize, Liouvillian};
pub use operators::{
    atomic_transition, build_operators, fock_annihilator, CMatrix, HilbertConfig, Level,
    OperatorMatrix, OperatorSet, HERMITIAN_RTOL,
};
pub use spectrum::{slowest_decay_rate, slowest_decay_rate_with, DecayRateOptions};
pub use state::{DensityState, HERMITIAN_TOL, POSITIVITY_TOL, TRACE_TOL};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LindbladError {
    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Hamiltonian is not Hermitian (relative error {error:e})")]
    NonHermitian { error: f64 },
    #[error(
        "invalid density matrix: trace error {trace_error:e}, \
         hermiticity error {hermiticity_error:e}, min eigenvalue {min_eigenvalue:e}"
    )]
    InvalidState {
        trace_error: f64,
        hermiticity_error: f64,
        min_eigenvalue: f64,
    },
    #[error("output times must be finite, non-negative and strictly increasing")]
    InvalidTimeGrid,
    #[error(
        "integrator could not reach the requested tolerance; stopped at t = {reached_time:e} s"
    )]
    StepBudgetExhausted { reached_time: f64 },
    #[error("eigendecomposition of the generator failed")]
    EigenDecompositionFailed,
    #[error("no decaying eigenmode overlaps the observable")]
    NoOverlappingMode,
    #[error("degenerate slow eigenvalues, candidate rates {candidates:?} 1/s")]
    DegenerateSlowModes { candidates: Vec<f64> },
}
