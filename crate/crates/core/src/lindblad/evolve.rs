// SPDX-License-Identifier: Apache-2.0

//! Time evolution `dρ/dt = L ρ` with an adaptive Dormand–Prince 5(4)
//! integrator.
//!
//! The generator is converted once to compressed-row form; the Lindblad
//! superoperators built here have at most a few nonzeros per row.

use nalgebra::DVector;
use num_complex::Complex64;

use super::liouvillian::{unvectorize, vectorize, Liouvillian};
use super::operators::Level;
use super::state::DensityState;
use super::LindbladError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step size in seconds. `None` uses
    /// `1 / fastest_rate(L)`.
    pub max_step: Option<f64>,
    /// Total (accepted + rejected) step budget.
    pub max_steps: usize,
    /// Keep the full density matrix at each output time.
    pub keep_states: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            max_step: None,
            max_steps: 50_000_000,
            keep_states: false,
        }
    }
}

/// Numerical-hygiene figures collected over all output times.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvolutionDiagnostics {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Atomic populations (and mean photon number) at the requested times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `[P_S, P_E, P_D]` at each time.
    pub populations: Vec<[f64; 3]>,
    pub photon_number: Vec<f64>,
    pub states: Option<Vec<DensityState>>,
    pub diagnostics: EvolutionDiagnostics,
}

impl Trajectory {
    pub fn population(&self, level: Level) -> Vec<f64> {
        self.populations.iter().map(|p| p[level.index()]).collect()
    }

    /// Largest deviation of `P_S + P_E + P_D` from one.
    pub fn population_sum_error(&self) -> f64 {
        self.populations
            .iter()
            .map(|p| (p.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Checks trace, Hermiticity and positivity at every output time.
    pub fn check_physical(&self) -> Result<(), LindbladError> {
        let d = &self.diagnostics;
        if d.max_trace_error > super::state::TRACE_TOL
            || d.max_hermiticity_error > super::state::HERMITIAN_TOL
            || d.min_eigenvalue < -super::state::POSITIVITY_TOL
        {
            return Err(LindbladError::InvalidState {
                trace_error: d.max_trace_error,
                hermiticity_error: d.max_hermiticity_error,
                min_eigenvalue: d.min_eigenvalue,
            });
        }
        Ok(())
    }
}

struct CsrGenerator {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl CsrGenerator {
    fn from_liouvillian(l: &Liouvillian) -> Self {
        let m = l.matrix();
        let n = m.nrows();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            row_ptr,
            cols,
            vals,
        }
    }

    fn apply(&self, y: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * y[self.cols[k]];
            }
            *o = acc;
        }
    }
}

// Dormand–Prince 5(4) tableau. The generator is time independent, so the
// node coefficients c_i are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Step-size controller (PI form with β = 0.04).
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

struct Stages {
    k: [Vec<Complex64>; 7],
    tmp: Vec<Complex64>,
    y_new: Vec<Complex64>,
}

/// Propagates a column-stacked state through `times` (strictly increasing,
/// starting at or after t = 0) and returns the vector at each time.
pub fn propagate(
    l: &Liouvillian,
    y0: &DVector<Complex64>,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<(Vec<DVector<Complex64>>, EvolutionDiagnostics), LindbladError> {
    let n = y0.len();
    if n != l.matrix().nrows() {
        return Err(LindbladError::DimensionMismatch {
            expected: l.matrix().nrows(),
            found: n,
        });
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LindbladError::InvalidTimeGrid);
    }

    let gen = CsrGenerator::from_liouvillian(l);
    let fastest = l.fastest_rate();
    let h_max = opts.max_step.unwrap_or(if fastest > 0.0 {
        1.0 / fastest
    } else {
        f64::INFINITY
    });

    let mut y: Vec<Complex64> = y0.iter().copied().collect();
    let mut st = Stages {
        k: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]),
        tmp: vec![Complex64::new(0.0, 0.0); n],
        y_new: vec![Complex64::new(0.0, 0.0); n],
    };
    gen.apply(&y, &mut st.k[0]);

    let mut diag = EvolutionDiagnostics::default();
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut h = initial_step(&y, &st.k[0], opts, h_max);
    let mut err_old: f64 = 1e-4;

    for &t_out in times {
        while t < t_out {
            if diag.accepted_steps + diag.rejected_steps >= opts.max_steps {
                return Err(LindbladError::StepBudgetExhausted { reached_time: t });
            }
            let remaining = t_out - t;
            let mut h_try = h.min(h_max);
            let last = h_try >= remaining * (1.0 - 1e-12);
            if last {
                h_try = remaining;
            }
            if h_try <= t.abs().max(t_out.abs()) * f64::EPSILON * 4.0 {
                return Err(LindbladError::StepBudgetExhausted { reached_time: t });
            }
            let err = dopri_step(&gen, &y, h_try, &mut st, opts);
            if !err.is_finite() {
                return Err(LindbladError::StepBudgetExhausted { reached_time: t });
            }
            if err <= 1.0 {
                diag.accepted_steps += 1;
                t = if last { t_out } else { t + h_try };
                std::mem::swap(&mut y, &mut st.y_new);
                // first-same-as-last
                st.k.swap(0, 6);
                let fac11 = err.max(1e-10).powf(0.2 - BETA * 0.75);
                let fac = (fac11 / err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let h_next = h_try / fac;
                // a step shortened to hit an output time must not shrink h
                h = if last { h.max(h_next) } else { h_next };
                err_old = err.max(1e-4);
            } else {
                diag.rejected_steps += 1;
                let fac11 = err.powf(0.2 - BETA * 0.75);
                h = h_try / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            }
        }
        out.push(DVector::from_column_slice(&y));
    }
    Ok((out, diag))
}

fn initial_step(y: &[Complex64], f0: &[Complex64], opts: &EvolveOptions, h_max: f64) -> f64 {
    let (mut d0, mut d1) = (0.0_f64, 0.0_f64);
    for (yi, fi) in y.iter().zip(f0) {
        let sc = opts.atol + opts.rtol * yi.norm();
        d0 = d0.max(yi.norm() / sc);
        d1 = d1.max(fi.norm() / sc);
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(h_max)
}

#[allow(clippy::needless_range_loop)]
fn dopri_step(
    gen: &CsrGenerator,
    y: &[Complex64],
    h: f64,
    st: &mut Stages,
    opts: &EvolveOptions,
) -> f64 {
    let n = y.len();
    let stages: [(usize, &[f64]); 5] = [
        (1, &[A21]),
        (2, &[A31, A32]),
        (3, &[A41, A42, A43]),
        (4, &[A51, A52, A53, A54]),
        (5, &[A61, A62, A63, A64, A65]),
    ];
    for (dst, coefs) in stages {
        for i in 0..n {
            let mut incr = Complex64::new(0.0, 0.0);
            for (j, a) in coefs.iter().enumerate() {
                incr += st.k[j][i] * *a;
            }
            st.tmp[i] = y[i] + incr * h;
        }
        gen.apply(&st.tmp, &mut st.k[dst]);
    }
    for i in 0..n {
        st.y_new[i] = y[i]
            + (st.k[0][i] * A71
                + st.k[2][i] * A73
                + st.k[3][i] * A74
                + st.k[4][i] * A75
                + st.k[5][i] * A76)
                * h;
    }
    {
        let (y_new, k) = (&st.y_new, &mut st.k[6]);
        gen.apply(y_new, k);
    }
    let mut acc = 0.0;
    for i in 0..n {
        let e = (st.k[0][i] * E1
            + st.k[2][i] * E3
            + st.k[3][i] * E4
            + st.k[4][i] * E5
            + st.k[5][i] * E6
            + st.k[6][i] * E7)
            * h;
        let sc = opts.atol + opts.rtol * y[i].norm().max(st.y_new[i].norm());
        let r = e.norm() / sc;
        acc += r * r;
    }
    (acc / n as f64).sqrt()
}

/// Evolves `rho0` under `l` and records populations at `times`.
pub fn evolve(
    rho0: &DensityState,
    l: &Liouvillian,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory, LindbladError> {
    let basis = rho0.basis();
    let d = basis.dim();
    if l.hilbert_dim() != d {
        return Err(LindbladError::DimensionMismatch {
            expected: d,
            found: l.hilbert_dim(),
        });
    }
    let (vecs, mut diag) = propagate(l, &vectorize(rho0.matrix()), times, opts)?;

    diag.min_eigenvalue = f64::INFINITY;
    let mut populations = Vec::with_capacity(times.len());
    let mut photon_number = Vec::with_capacity(times.len());
    let mut states = opts.keep_states.then(|| Vec::with_capacity(times.len()));
    for v in &vecs {
        let state = DensityState::new_unchecked(unvectorize(v, d), basis)?;
        diag.max_trace_error = diag.max_trace_error.max(state.trace_error());
        diag.max_hermiticity_error = diag.max_hermiticity_error.max(state.hermiticity_error());
        diag.min_eigenvalue = diag.min_eigenvalue.min(state.min_eigenvalue());
        populations.push(Level::ALL.map(|lv| state.population(lv)));
        photon_number.push(state.photon_number());
        if let Some(s) = states.as_mut() {
            s.push(state);
        }
    }
    Ok(Trajectory {
        times: times.to_vec(),
        populations,
        photon_number,
        states,
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::liouvillian::build_liouvillian;
    use crate::lindblad::operators::{build_operators, HilbertConfig, OperatorMatrix};
    use std::f64::consts::PI;

    #[test]
    fn rabi_flop_reaches_excited_state() {
        let omega = 2.0 * PI * 1.0e6;
        let cfg = HilbertConfig::new(0);
        let ops = build_operators(cfg);
        let h = (&ops.transition(Level::E, Level::S) + &ops.transition(Level::S, Level::E))
            .scaled(omega / 2.0);
        let l = build_liouvillian(&h, &[]).unwrap();
        let rho0 = DensityState::basis_state(cfg, Level::S, 0);
        let times: Vec<f64> = (1..=20).map(|i| i as f64 * 0.05 * PI / omega).collect();
        let traj = evolve(&rho0, &l, &times, &EvolveOptions::default()).unwrap();
        for (t, pe) in traj.times.iter().zip(traj.population(Level::E)) {
            let want = (omega * t / 2.0).sin().powi(2);
            assert!((pe - want).abs() < 1e-6, "t={t} pe={pe} want={want}");
        }
        assert!((traj.population(Level::E)[19] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn empty_cavity_decays_exponentially() {
        let kappa = 2.0 * PI * 320e6;
        let cfg = HilbertConfig::new(1);
        let ops = build_operators(cfg);
        let l = build_liouvillian(
            &OperatorMatrix::zeros(cfg.dim()),
            &[ops.a.scaled((2.0 * kappa).sqrt())],
        )
        .unwrap();
        let rho0 = DensityState::basis_state(cfg, Level::S, 1);
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.2e-9).collect();
        let traj = evolve(&rho0, &l, &times, &EvolveOptions::default()).unwrap();
        for (t, n) in traj.times.iter().zip(&traj.photon_number) {
            assert!((n - (-2.0 * kappa * t).exp()).abs() < 1e-6);
        }
        traj.check_physical().unwrap();
    }

    #[test]
    fn step_budget_error_reports_time() {
        let cfg = HilbertConfig::new(0);
        let ops = build_operators(cfg);
        let h =
            (&ops.transition(Level::E, Level::S) + &ops.transition(Level::S, Level::E)).scaled(1.0);
        let l = build_liouvillian(&h, &[]).unwrap();
        let rho0 = DensityState::basis_state(cfg, Level::S, 0);
        let opts = EvolveOptions {
            max_steps: 10,
            max_step: Some(0.01),
            ..Default::default()
        };
        match evolve(&rho0, &l, &[1.0], &opts) {
            Err(LindbladError::StepBudgetExhausted { reached_time }) => {
                assert!(reached_time > 0.0 && reached_time < 1.0)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unsorted_times_rejected() {
        let cfg = HilbertConfig::new(0);
        let l = build_liouvillian(&OperatorMatrix::zeros(3), &[]).unwrap();
        let rho0 = DensityState::basis_state(cfg, Level::S, 0);
        assert!(matches!(
            evolve(&rho0, &l, &[2.0, 1.0], &EvolveOptions::default()),
            Err(LindbladError::InvalidTimeGrid)
        ));
    }
}
