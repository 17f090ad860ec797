// SPDX-License-Identifier: Apache-2.0

//! Damped (Levenberg–Marquardt) least squares for the three curve shapes
//! used in the experiment: saturating and decaying exponentials and a 1D
//! Gaussian in the 1/e² waist convention.
//!
//! Time constants and waists are optimized as logarithms so they stay
//! positive.

use nalgebra::{DMatrix, DVector};

use super::FitError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModelKind {
    /// `A [1 − exp(−x/τ)]`, parameters `[A, tau]`.
    SaturatingExponential,
    /// `A exp(−x/τ) + c`, parameters `[A, tau, c]`.
    DecayingExponential,
    /// `A exp(−2(u − u0)²/w²) + c`, parameters `[A, u0, w, c]`.
    Gaussian1d,
}

impl FitModelKind {
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Self::SaturatingExponential => &["A", "tau"],
            Self::DecayingExponential => &["A", "tau", "c"],
            Self::Gaussian1d => &["A", "u0", "w", "c"],
        }
    }

    fn log_scaled(self) -> &'static [bool] {
        match self {
            Self::SaturatingExponential => &[false, true],
            Self::DecayingExponential => &[false, true, false],
            Self::Gaussian1d => &[false, false, true, false],
        }
    }

    pub fn eval(self, x: f64, p: &[f64]) -> f64 {
        match self {
            Self::SaturatingExponential => p[0] * (1.0 - (-x / p[1]).exp()),
            Self::DecayingExponential => p[0] * (-x / p[1]).exp() + p[2],
            Self::Gaussian1d => {
                let du = x - p[1];
                p[0] * (-2.0 * du * du / (p[2] * p[2])).exp() + p[3]
            }
        }
    }

    /// Gradient with respect to the internal coordinates (log for τ, w).
    fn internal_gradient(self, x: f64, p: &[f64], out: &mut [f64]) {
        match self {
            Self::SaturatingExponential => {
                let e = (-x / p[1]).exp();
                out[0] = 1.0 - e;
                out[1] = -p[0] * e * x / p[1];
            }
            Self::DecayingExponential => {
                let e = (-x / p[1]).exp();
                out[0] = e;
                out[1] = p[0] * e * x / p[1];
                out[2] = 1.0;
            }
            Self::Gaussian1d => {
                let du = x - p[1];
                let w2 = p[2] * p[2];
                let g = (-2.0 * du * du / w2).exp();
                out[0] = g;
                out[1] = p[0] * g * 4.0 * du / w2;
                out[2] = p[0] * g * 4.0 * du * du / w2;
                out[3] = 1.0;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitModel {
    pub kind: FitModelKind,
    pub fixed: Vec<bool>,
    pub initial: Vec<f64>,
}

impl FitModel {
    pub fn new(kind: FitModelKind, initial: Vec<f64>) -> Result<Self, FitError> {
        let n = kind.param_names().len();
        if initial.len() != n {
            return Err(FitError::InvalidInitialGuess(format!(
                "{kind:?} takes {n} parameters, got {}",
                initial.len()
            )));
        }
        for (i, (&v, &log)) in initial.iter().zip(kind.log_scaled()).enumerate() {
            if !v.is_finite() || (log && v <= 0.0) {
                return Err(FitError::InvalidInitialGuess(format!(
                    "{} = {v}",
                    kind.param_names()[i]
                )));
            }
        }
        Ok(Self {
            kind,
            fixed: vec![false; n],
            initial,
        })
    }

    /// Holds parameter `name` at `value` during the fit.
    pub fn fix(mut self, name: &str, value: f64) -> Result<Self, FitError> {
        let i = self
            .kind
            .param_names()
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| FitError::InvalidInitialGuess(format!("unknown parameter {name}")))?;
        self.fixed[i] = true;
        self.initial[i] = value;
        Ok(self)
    }

    pub fn free_count(&self) -> usize {
        self.fixed.iter().filter(|f| !**f).count()
    }
}

/// `(x, y, σ_y)` samples. Without explicit σ all points carry unit weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
    /// `y` are photon counts; the model wrappers refine σ from the fitted
    /// curve.
    pub shot_noise: bool,
}

impl Dataset {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, FitError> {
        if x.len() != y.len() {
            return Err(FitError::LengthMismatch);
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(FitError::NonFinite);
        }
        Ok(Self {
            x,
            y,
            sigma: None,
            shot_noise: false,
        })
    }

    pub fn with_sigma(x: Vec<f64>, y: Vec<f64>, sigma: Vec<f64>) -> Result<Self, FitError> {
        let mut d = Self::new(x, y)?;
        if sigma.len() != d.x.len() {
            return Err(FitError::LengthMismatch);
        }
        if sigma.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(FitError::InvalidSigma);
        }
        d.sigma = Some(sigma);
        Ok(d)
    }

    /// Photon-count data with shot-noise errors, initially `σ = √max(N, 1)`
    /// from the observed counts.
    pub fn from_counts(x: Vec<f64>, counts: Vec<f64>) -> Result<Self, FitError> {
        let sigma = counts.iter().map(|n| n.max(1.0).sqrt()).collect();
        let mut d = Self::with_sigma(x, counts, sigma)?;
        d.shot_noise = true;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn weight(&self, i: usize) -> f64 {
        self.sigma.as_ref().map_or(1.0, |s| 1.0 / s[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Converged when an accepted step lowers χ² by less than this fraction.
    pub chi2_rtol: f64,
    /// Converged when the step norm (internal coordinates) falls below this.
    pub step_tol: f64,
    /// Use σ_y as absolute errors. When `None`, absolute if the dataset
    /// carries σ, otherwise rescaled by the reduced χ².
    pub absolute_sigma: Option<bool>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            chi2_rtol: 1e-10,
            step_tol: 1e-12,
            absolute_sigma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub kind: FitModelKind,
    pub values: Vec<f64>,
    /// 1σ errors from the inverse curvature of χ²; zero for fixed
    /// parameters.
    pub uncertainties: Vec<f64>,
    pub fixed: Vec<bool>,
    pub chi2: f64,
    pub dof: usize,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn names(&self) -> &'static [&'static str] {
        self.kind.param_names()
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.names().iter().position(|n| *n == name)
    }

    /// `(value, σ)` of a parameter, or `None` for an unknown name.
    pub fn get(&self, name: &str) -> Option<(f64, f64)> {
        self.index(name)
            .map(|i| (self.values[i], self.uncertainties[i]))
    }

    pub fn value(&self, name: &str) -> f64 {
        self.get(name).map_or(f64::NAN, |(v, _)| v)
    }

    pub fn uncertainty(&self, name: &str) -> f64 {
        self.get(name).map_or(f64::NAN, |(_, s)| s)
    }

    pub fn reduced_chi2(&self) -> f64 {
        if self.dof == 0 {
            f64::NAN
        } else {
            self.chi2 / self.dof as f64
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.kind.eval(x, &self.values)
    }

    /// Parameters of a fit that did not converge are unusable.
    pub fn require_converged(self) -> Result<Self, FitError> {
        if self.converged {
            Ok(self)
        } else {
            Err(FitError::NotConverged {
                iterations: self.iterations,
            })
        }
    }
}

struct Problem<'a> {
    kind: FitModelKind,
    data: &'a Dataset,
    template: Vec<f64>,
    free: Vec<usize>,
}

impl Problem<'_> {
    fn external(&self, theta: &[f64]) -> Vec<f64> {
        let mut p = self.template.clone();
        let log = self.kind.log_scaled();
        for (k, &i) in self.free.iter().enumerate() {
            p[i] = if log[i] { theta[k].exp() } else { theta[k] };
        }
        p
    }

    fn chi2(&self, theta: &[f64]) -> f64 {
        let p = self.external(theta);
        (0..self.data.len())
            .map(|i| {
                let r = (self.data.y[i] - self.kind.eval(self.data.x[i], &p)) * self.data.weight(i);
                r * r
            })
            .sum()
    }

    /// Weighted Jacobian `J` and residuals `r`.
    fn linearize(&self, theta: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
        let p = self.external(theta);
        let n = self.data.len();
        let mut jac = DMatrix::zeros(n, self.free.len());
        let mut res = DVector::zeros(n);
        let mut grad = vec![0.0; p.len()];
        for i in 0..n {
            let w = self.data.weight(i);
            let x = self.data.x[i];
            res[i] = (self.data.y[i] - self.kind.eval(x, &p)) * w;
            self.kind.internal_gradient(x, &p, &mut grad);
            for (k, &j) in self.free.iter().enumerate() {
                jac[(i, k)] = grad[j] * w;
            }
        }
        (jac, res)
    }

    fn check_identifiable(&self, jtj: &DMatrix<f64>) -> Result<(), FitError> {
        let names = self.kind.param_names();
        let k = self.free.len();
        let diag: Vec<f64> = (0..k).map(|i| jtj[(i, i)]).collect();
        let scale = diag.iter().copied().fold(0.0, f64::max);
        let flat: Vec<&'static str> = (0..k)
            .filter(|&i| diag[i] <= 1e-28 * scale)
            .map(|i| names[self.free[i]])
            .collect();
        if !flat.is_empty() {
            return Err(FitError::DegenerateDirection { parameters: flat });
        }
        let normalized = DMatrix::from_fn(k, k, |i, j| jtj[(i, j)] / (diag[i] * diag[j]).sqrt());
        let eig = normalized.symmetric_eigen();
        let (imin, &lmin) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("at least one free parameter");
        if lmin < 1e-13 {
            let v = eig.eigenvectors.column(imin);
            let vmax = v.iter().map(|c| c.abs()).fold(0.0, f64::max);
            let parameters = (0..k)
                .filter(|&i| v[i].abs() >= 0.3 * vmax)
                .map(|i| names[self.free[i]])
                .collect();
            return Err(FitError::DegenerateDirection { parameters });
        }
        Ok(())
    }
}

/// Minimizes `χ² = Σ ((y − f(x))/σ)²` over the free parameters of `model`.
pub fn damped_least_squares(
    model: &FitModel,
    data: &Dataset,
    opts: &FitOptions,
) -> Result<FitResult, FitError> {
    let kind = model.kind;
    let n_params = kind.param_names().len();
    if model.initial.len() != n_params || model.fixed.len() != n_params {
        return Err(FitError::InvalidInitialGuess(
            "parameter vector has wrong length".into(),
        ));
    }
    let free: Vec<usize> = (0..n_params).filter(|&i| !model.fixed[i]).collect();
    let k = free.len();
    if data.len() < k + 1 {
        return Err(FitError::TooFewPoints {
            needed: k + 1,
            found: data.len(),
        });
    }
    let log = kind.log_scaled();
    for &i in &free {
        if log[i] && !(model.initial[i] > 0.0) {
            return Err(FitError::InvalidInitialGuess(format!(
                "{} must be positive",
                kind.param_names()[i]
            )));
        }
    }
    let problem = Problem {
        kind,
        data,
        template: model.initial.clone(),
        free: free.clone(),
    };
    let mut theta: Vec<f64> = free
        .iter()
        .map(|&i| {
            if log[i] {
                model.initial[i].ln()
            } else {
                model.initial[i]
            }
        })
        .collect();

    let (mut jac, mut res) = problem.linearize(&theta);
    let mut chi2 = res.norm_squared();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    let mut checked = false;

    while iterations < opts.max_iterations {
        iterations += 1;
        let jtj = jac.transpose() * &jac;
        if !checked {
            problem.check_identifiable(&jtj)?;
            checked = true;
        }
        if chi2 == 0.0 {
            converged = true;
            break;
        }
        let grad = jac.transpose() * &res;
        let mut a = jtj.clone();
        for i in 0..k {
            a[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
        }
        let step = match a.cholesky() {
            Some(ch) => ch.solve(&grad),
            None => {
                lambda *= 10.0;
                if lambda > 1e20 {
                    break;
                }
                continue;
            }
        };
        let theta_norm = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
        let small_step = step.norm() <= opts.step_tol * (theta_norm + opts.step_tol);
        let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
        let chi2_trial = problem.chi2(&trial);
        if chi2_trial.is_finite() && chi2_trial <= chi2 {
            let rel = (chi2 - chi2_trial) / chi2;
            theta = trial;
            chi2 = chi2_trial;
            (jac, res) = problem.linearize(&theta);
            lambda = (lambda / 10.0).max(1e-12);
            if rel < opts.chi2_rtol || small_step {
                converged = true;
                break;
            }
        } else {
            if small_step {
                converged = true;
                break;
            }
            lambda *= 10.0;
            if lambda > 1e20 {
                // no downhill direction left at working precision
                converged = true;
                break;
            }
        }
    }

    let values = problem.external(&theta);
    let dof = data.len() - k;
    let absolute = opts.absolute_sigma.unwrap_or(data.sigma.is_some());
    let scale = if absolute || dof == 0 {
        1.0
    } else {
        chi2 / dof as f64
    };
    let jtj = jac.transpose() * &jac;
    let cov = jtj
        .clone()
        .try_inverse()
        .ok_or_else(|| FitError::DegenerateDirection {
            parameters: free.iter().map(|&i| kind.param_names()[i]).collect(),
        })?;
    let mut uncertainties = vec![0.0; n_params];
    for (kk, &i) in free.iter().enumerate() {
        let s = (cov[(kk, kk)].max(0.0) * scale).sqrt();
        uncertainties[i] = if log[i] { values[i] * s } else { s };
    }
    Ok(FitResult {
        kind,
        values,
        uncertainties,
        fixed: model.fixed.clone(),
        chi2,
        dof,
        converged,
        iterations,
    })
}

/// Linear interpolation of the first `x` where `y` crosses `level`.
fn first_crossing(data: &Dataset, level: f64, rising: bool) -> Option<f64> {
    let crossed = |y: f64| if rising { y >= level } else { y <= level };
    for i in 0..data.len() {
        if crossed(data.y[i]) {
            if i == 0 {
                return Some(data.x[0]);
            }
            let (x0, x1, y0, y1) = (data.x[i - 1], data.x[i], data.y[i - 1], data.y[i]);
            if y1 == y0 {
                return Some(x1);
            }
            return Some(x0 + (level - y0) * (x1 - x0) / (y1 - y0));
        }
    }
    None
}

fn span(data: &Dataset) -> f64 {
    let (lo, hi) = data
        .x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    hi - lo
}

/// Automatic starting point for `A[1 − exp(−x/τ)]`.
pub fn guess_saturating(data: &Dataset) -> Vec<f64> {
    let tail = data.len().min(3);
    let a = data.y[data.len() - tail..].iter().sum::<f64>() / tail as f64;
    let tau = first_crossing(data, (1.0 - (-1.0f64).exp()) * a, a >= 0.0)
        .filter(|t| *t > 0.0)
        .unwrap_or(span(data) / 3.0)
        .max(f64::MIN_POSITIVE);
    vec![a, tau]
}

/// Automatic starting point for `A exp(−x/τ) + c`; `c` is taken as zero
/// when `offset` is `None`.
pub fn guess_decaying(data: &Dataset, offset: Option<f64>) -> Vec<f64> {
    let n = data.len();
    let c = offset.unwrap_or(0.0);
    let (x0, y0) = (data.x[0], data.y[0]);
    let target = y0 - (1.0 - (-1.0f64).exp()) * (y0 - c);
    let tau = match first_crossing(data, target, y0 < c) {
        Some(xc) if xc > x0 => xc - x0,
        _ => {
            let ratio = (data.y[n - 1] - c) / (y0 - c);
            let dx = data.x[n - 1] - x0;
            if ratio > 0.0 && ratio < 1.0 {
                -dx / ratio.ln()
            } else {
                span(data).max(f64::MIN_POSITIVE) * 3.0
            }
        }
    };
    let a = (y0 - c) * (x0 / tau).exp();
    vec![a, tau, c]
}

/// Automatic starting point for the Gaussian: offset from the minimum,
/// center and 1/e² radius from the first and second moments.
pub fn guess_gaussian(data: &Dataset) -> Vec<f64> {
    let c = data.y.iter().copied().fold(f64::INFINITY, f64::min);
    let a = data.y.iter().copied().fold(f64::NEG_INFINITY, f64::max) - c;
    let weights: Vec<f64> = data.y.iter().map(|y| (y - c).max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        let mid = data.x.iter().sum::<f64>() / data.len() as f64;
        return vec![a, mid, span(data).max(f64::MIN_POSITIVE) / 4.0, c];
    }
    let u0 = weights.iter().zip(&data.x).map(|(w, x)| w * x).sum::<f64>() / total;
    let var = weights
        .iter()
        .zip(&data.x)
        .map(|(w, x)| w * (x - u0) * (x - u0))
        .sum::<f64>()
        / total;
    let w = (2.0 * var.sqrt())
        .max(span(data) * 1e-3)
        .max(f64::MIN_POSITIVE);
    vec![a, u0, w, c]
}

/// Fits `A[1 − exp(−T/τ_D)]`.
pub fn fit_tau_saturating(data: &Dataset) -> Result<FitResult, FitError> {
    check_len(data, 3)?;
    let model = FitModel::new(FitModelKind::SaturatingExponential, guess_saturating(data))?;
    fit_model(model, data)
}

/// Fits `A exp(−T/τ)` (offset held at zero).
pub fn fit_tau_decaying(data: &Dataset) -> Result<FitResult, FitError> {
    check_len(data, 3)?;
    let model = FitModel::new(
        FitModelKind::DecayingExponential,
        guess_decaying(data, None),
    )?
    .fix("c", 0.0)?;
    fit_model(model, data)
}

/// Fits `A exp(−T/τ) + c` with a free offset.
pub fn fit_tau_decaying_with_offset(data: &Dataset) -> Result<FitResult, FitError> {
    check_len(data, 4)?;
    let n = data.len();
    let offset = data.y[n - 1];
    let mut initial = guess_decaying(data, Some(offset));
    if !(initial[1] > 0.0) {
        initial[1] = span(data);
    }
    let model = FitModel::new(FitModelKind::DecayingExponential, initial)?;
    fit_model(model, data)
}

/// Fits `A exp(−2(u − u0)²/w²) + c`.
pub fn fit_gaussian(data: &Dataset) -> Result<FitResult, FitError> {
    check_len(data, 5)?;
    let model = FitModel::new(FitModelKind::Gaussian1d, guess_gaussian(data))?;
    fit_model(model, data)
}

/// Fits the Gaussian to data with multiplicative noise of known relative
/// size. Starts unweighted, then refits three times with
/// `σ_i = relative · |model(x_i)|` (floored at 1e-6 of the amplitude) and
/// absolute uncertainties.
pub fn fit_gaussian_relative_noise(data: &Dataset, relative: f64) -> Result<FitResult, FitError> {
    if !(relative > 0.0 && relative.is_finite()) {
        return Err(FitError::InvalidSigma);
    }
    let plain = Dataset::new(data.x.clone(), data.y.clone())?;
    let mut fit = fit_gaussian(&plain)?;
    for _ in 0..3 {
        let floor = 1e-6 * fit.value("A").abs().max(f64::MIN_POSITIVE);
        let sigma = data
            .x
            .iter()
            .map(|&x| relative * fit.eval(x).abs().max(floor))
            .collect();
        let weighted = Dataset::with_sigma(data.x.clone(), data.y.clone(), sigma)?;
        let model = FitModel::new(FitModelKind::Gaussian1d, fit.values.clone())?;
        let opts = FitOptions {
            absolute_sigma: Some(true),
            ..FitOptions::default()
        };
        fit = damped_least_squares(&model, &weighted, &opts)?;
    }
    Ok(fit)
}

/// Runs the fit; for count data, refits three times with
/// `σ = √max(model, 1)` because weights from the observed counts bias the
/// result towards downward fluctuations.
fn fit_model(model: FitModel, data: &Dataset) -> Result<FitResult, FitError> {
    let opts = FitOptions::default();
    let mut fit = damped_least_squares(&model, data, &opts)?;
    if data.shot_noise {
        for _ in 0..3 {
            let sigma = data
                .x
                .iter()
                .map(|&x| fit.eval(x).max(1.0).sqrt())
                .collect();
            let weighted = Dataset::with_sigma(data.x.clone(), data.y.clone(), sigma)?;
            let refined = FitModel {
                initial: fit.values.clone(),
                ..model.clone()
            };
            fit = damped_least_squares(&refined, &weighted, &opts)?;
        }
    }
    Ok(fit)
}

fn check_len(data: &Dataset, needed: usize) -> Result<(), FitError> {
    if data.len() < needed {
        return Err(FitError::TooFewPoints {
            needed,
            found: data.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, x0: f64, x1: f64) -> Vec<f64> {
        (0..n)
            .map(|i| x0 + (x1 - x0) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn exact_guess_recovers_decay() {
        let x = grid(30, 0.0, 5.0);
        let truth = [2.5, 1.3, 0.2];
        let y = x
            .iter()
            .map(|&xi| FitModelKind::DecayingExponential.eval(xi, &truth))
            .collect();
        let data = Dataset::new(x, y).unwrap();
        let model = FitModel::new(FitModelKind::DecayingExponential, truth.to_vec()).unwrap();
        let fit = damped_least_squares(&model, &data, &FitOptions::default()).unwrap();
        assert!(fit.converged);
        for (v, t) in fit.values.iter().zip(truth) {
            assert!((v - t).abs() <= 1e-10 * t.abs());
        }
    }

    #[test]
    fn constant_data_has_degenerate_center() {
        let x = grid(20, -3.0, 3.0);
        let data = Dataset::new(x, vec![0.7; 20]).unwrap();
        match fit_gaussian(&data) {
            Err(FitError::DegenerateDirection { parameters }) => {
                assert!(parameters.contains(&"u0"), "{parameters:?}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_few_points() {
        let data = Dataset::new(vec![0.0, 1.0], vec![1.0, 0.5]).unwrap();
        assert!(matches!(
            fit_tau_decaying(&data),
            Err(FitError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn iteration_cap_flags_unusable() {
        let x = grid(40, 0.0, 10.0);
        let y = x
            .iter()
            .map(|&xi| 3.0 * (1.0 - (-xi / 2.0f64).exp()))
            .collect();
        let data = Dataset::new(x, y).unwrap();
        let model = FitModel::new(FitModelKind::SaturatingExponential, vec![0.1, 50.0]).unwrap();
        let opts = FitOptions {
            max_iterations: 2,
            ..Default::default()
        };
        let fit = damped_least_squares(&model, &data, &opts).unwrap();
        assert!(!fit.converged);
        assert!(fit.require_converged().is_err());
    }

    #[test]
    fn shot_noise_weights() {
        let d = Dataset::from_counts(vec![0.0, 1.0, 2.0], vec![100.0, 0.0, 25.0]).unwrap();
        assert_eq!(d.sigma.unwrap(), vec![10.0, 1.0, 5.0]);
    }

    #[test]
    fn sigma_must_be_positive() {
        assert!(matches!(
            Dataset::with_sigma(vec![0.0], vec![1.0], vec![0.0]),
            Err(FitError::InvalidSigma)
        ));
    }
}
