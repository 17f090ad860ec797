// SPDX-License-Identifier: Apache-2.0

//! Curve fitting and simulation-based parameter inversion.

mod fit;
mod inversion;
mod root;

pub use fit::{
    damped_least_squares, fit_gaussian, fit_gaussian_relative_noise, fit_tau_decaying,
    fit_tau_decaying_with_offset, fit_tau_saturating, guess_decaying, guess_gaussian,
    guess_saturating, Dataset, FitModel, FitModelKind, FitOptions, FitResult,
};
pub use inversion::{
    calibrate_repump_drive, extract_coupling, invert_g_from_tau, invert_rabi_from_tau,
    lambda_decay_fit, lambda_decay_time, repump_time, CouplingExtraction, Inversion,
    InversionOptions,
};
pub use root::brent;

use thiserror::Error;

use crate::ion_cavity::ModelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {needed} data points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("x, y and sigma must have equal length")]
    LengthMismatch,
    #[error("data contains non-finite values")]
    NonFinite,
    #[error("sigma must be positive and finite")]
    InvalidSigma,
    #[error("invalid initial guess: {0}")]
    InvalidInitialGuess(String),
    #[error("normal matrix is singular along parameters {parameters:?}")]
    DegenerateDirection { parameters: Vec<&'static str> },
    #[error("fit did not converge within {iterations} iterations")]
    NotConverged { iterations: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("root not bracketed: f({a:e}) = {fa:e}, f({b:e}) = {fb:e}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("root finder hit the iteration limit near {best:e}")]
    MaxIterations { best: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("invalid inversion target: {0}")]
    InvalidTarget(String),
    #[error(
        "target tau {target:e} s is outside the achievable range [{tau_min:e}, {tau_max:e}] s"
    )]
    Unreachable {
        target: f64,
        tau_min: f64,
        tau_max: f64,
    },
    #[error("resonant tau {tau_on:e} s is not shorter than the cavity-free tau {tau_off:e} s")]
    CavityCannotSlow { tau_on: f64, tau_off: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Root(#[from] RootError),
}
