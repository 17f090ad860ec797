// SPDX-License-Identifier: Apache-2.0

//! Model inversion: find the drive strength and cavity coupling whose
//! simulated Λ-transfer times match measured ones, and calibrate the
//! cavity repump drive.
//!
//! Each objective runs the full master equation, fits the resulting
//! `P_S(T)` trace with `A exp(−T/τ)`, and compares τ with the target.

use std::collections::HashMap;

use super::fit::{fit_tau_decaying, fit_tau_saturating, Dataset, FitResult};
use super::root::brent;
use super::{EstimationError, RootError};
use crate::ion_cavity::{
    analytic_rates, simulate_lambda_sequence_with, simulate_repump_sequence, PulseSequenceSpec,
    SequenceKind, SystemParams,
};
use crate::lindblad::{EvolveOptions, Level};

#[derive(Debug, Clone, PartialEq)]
pub struct InversionOptions {
    /// Relative tolerance on the recovered parameter.
    pub rtol: f64,
    pub max_iterations: usize,
    /// Readout grid for the simulated Λ-drive.
    pub sequence: PulseSequenceSpec,
    pub evolve: EvolveOptions,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-4,
            max_iterations: 60,
            sequence: PulseSequenceSpec::lambda_default(),
            evolve: EvolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    /// Recovered parameter (rad/s).
    pub value: f64,
    /// Simulated τ at `value`.
    pub tau: f64,
    /// Number of distinct master-equation runs.
    pub evaluations: usize,
}

/// Simulates the Λ-drive and fits `A exp(−T/τ)` to `P_S`.
pub fn lambda_decay_fit(
    p: &SystemParams,
    sequence: &PulseSequenceSpec,
    evolve: &EvolveOptions,
) -> Result<FitResult, EstimationError> {
    let traj = simulate_lambda_sequence_with(p, sequence, evolve)?;
    let data = Dataset::new(traj.times.clone(), traj.population(Level::S))?;
    Ok(fit_tau_decaying(&data)?.require_converged()?)
}

/// Fitted Λ-transfer time constant τ in seconds.
pub fn lambda_decay_time(
    p: &SystemParams,
    opts: &InversionOptions,
) -> Result<f64, EstimationError> {
    Ok(lambda_decay_fit(p, &opts.sequence, &opts.evolve)?.value("tau"))
}

/// Memoizes τ(x) so Brent never re-runs a simulation for a sample it has
/// already seen.
struct CachedTau<F> {
    eval: F,
    cache: HashMap<u64, f64>,
}

impl<F: FnMut(f64) -> Result<f64, EstimationError>> CachedTau<F> {
    fn new(eval: F) -> Self {
        Self {
            eval,
            cache: HashMap::new(),
        }
    }

    fn tau(&mut self, x: f64) -> Result<f64, EstimationError> {
        if let Some(t) = self.cache.get(&x.to_bits()) {
            return Ok(*t);
        }
        let t = (self.eval)(x)?;
        self.cache.insert(x.to_bits(), t);
        Ok(t)
    }

    fn evaluations(&self) -> usize {
        self.cache.len()
    }
}

/// Drive strength that makes the cavity-free Λ-transfer time equal
/// `tau_off`. The cavity coupling in `fixed` is ignored.
pub fn invert_rabi_from_tau(
    tau_off: f64,
    fixed: &SystemParams,
    opts: &InversionOptions,
) -> Result<Inversion, EstimationError> {
    if !(tau_off > 0.0 && tau_off.is_finite()) {
        return Err(EstimationError::InvalidTarget(format!(
            "tau_off = {tau_off}"
        )));
    }
    let base = SystemParams {
        g: 0.0,
        omega_297: 0.0,
        ..*fixed
    }
    .without_cavity();
    base.validate()?;
    let gamma = base.gamma_total;

    let mut sim = CachedTau::new(|omega: f64| {
        lambda_decay_time(
            &SystemParams {
                omega_297: omega,
                ..base
            },
            opts,
        )
    });

    // weak-drive estimate: τ = 1 / (P_E · 2(1−β)Γ)
    let leak = 2.0 * (1.0 - base.beta) * gamma;
    let p_e = 1.0 / (tau_off * leak);
    let detuning_sq = base.delta_laser * base.delta_laser + gamma * gamma;
    let omega_cap = 50.0 * gamma.max(base.delta_laser.abs());
    let omega_est = if p_e < 0.45 {
        (p_e * detuning_sq / (0.25 - 0.5 * p_e))
            .sqrt()
            .min(omega_cap)
    } else {
        omega_cap
    };
    let omega_floor = 1e-4 * omega_est.min(gamma);

    // τ(Ω) decreases with Ω: need f(lo) > 0 > f(hi)
    let mut lo = omega_est / 1.5;
    let mut hi = (omega_est * 1.5).min(omega_cap);
    while sim.tau(hi)? > tau_off {
        if hi >= omega_cap {
            return Err(EstimationError::Unreachable {
                target: tau_off,
                tau_min: sim.tau(omega_cap)?,
                tau_max: f64::INFINITY,
            });
        }
        lo = hi;
        hi = (hi * 2.0).min(omega_cap);
    }
    while sim.tau(lo)? < tau_off {
        if lo <= omega_floor {
            return Err(EstimationError::Unreachable {
                target: tau_off,
                tau_min: sim.tau(omega_cap)?,
                tau_max: sim.tau(lo)?,
            });
        }
        hi = lo;
        lo = (lo / 2.0).max(omega_floor);
    }

    let xtol = opts.rtol * lo;
    let omega = brent(
        |x| Ok::<_, EstimationError>(sim.tau(x)? - tau_off),
        lo,
        hi,
        xtol,
        opts.max_iterations,
    )?;
    Ok(Inversion {
        value: omega,
        tau: sim.tau(omega)?,
        evaluations: sim.evaluations(),
    })
}

/// Cavity coupling that shortens the Λ-transfer time to `tau_on` at drive
/// strength `omega_297`.
pub fn invert_g_from_tau(
    tau_on: f64,
    omega_297: f64,
    fixed: &SystemParams,
    opts: &InversionOptions,
) -> Result<Inversion, EstimationError> {
    if !(tau_on > 0.0 && tau_on.is_finite()) {
        return Err(EstimationError::InvalidTarget(format!("tau_on = {tau_on}")));
    }
    let base = SystemParams {
        omega_297,
        n_max: fixed.n_max.max(1),
        ..*fixed
    };
    SystemParams { g: 0.0, ..base }.validate()?;

    let mut sim = CachedTau::new(|g: f64| lambda_decay_time(&SystemParams { g, ..base }, opts));
    let tau_off = sim.tau(0.0)?;
    if tau_on >= tau_off {
        if (tau_on - tau_off).abs() <= opts.rtol * tau_off {
            return Ok(Inversion {
                value: 0.0,
                tau: tau_off,
                evaluations: sim.evaluations(),
            });
        }
        return Err(EstimationError::CavityCannotSlow { tau_on, tau_off });
    }

    // bad-cavity estimate: 1/τ_on − 1/τ_off = P_E · 2g²/κ
    let rates = analytic_rates(&SystemParams { g: 0.0, ..base });
    let purcell = (1.0 / tau_on - 1.0 / tau_off) / rates.p_e_weak;
    let g_cap = base.kappa.max(base.gamma_total);
    let g_est = (purcell * base.kappa / 2.0)
        .sqrt()
        .clamp(1e-6 * g_cap, g_cap);

    let mut hi = (g_est * 1.5).min(g_cap);
    let mut lo = g_est / 1.5;
    while sim.tau(hi)? > tau_on {
        if hi >= g_cap {
            return Err(EstimationError::Unreachable {
                target: tau_on,
                tau_min: sim.tau(g_cap)?,
                tau_max: tau_off,
            });
        }
        lo = hi;
        hi = (hi * 2.0).min(g_cap);
    }
    if sim.tau(lo)? < tau_on {
        lo = 0.0;
    }

    let xtol = opts.rtol * g_est;
    let g = brent(
        |x| Ok::<_, EstimationError>(sim.tau(x)? - tau_on),
        lo,
        hi,
        xtol,
        opts.max_iterations,
    )?;
    Ok(Inversion {
        value: g,
        tau: sim.tau(g)?,
        evaluations: sim.evaluations(),
    })
}

/// Result of running both inversions back to back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingExtraction {
    pub omega_297: Inversion,
    pub g: Inversion,
}

impl CouplingExtraction {
    /// `g / Γ` with the total dipole decay rate of `params`.
    pub fn g_over_gamma(&self, params: &SystemParams) -> f64 {
        self.g.value / params.gamma_total
    }
}

/// Off-resonant τ fixes Ω₂₉₇, resonant τ then fixes g.
pub fn extract_coupling(
    tau_off: f64,
    tau_on: f64,
    fixed: &SystemParams,
    opts: &InversionOptions,
) -> Result<CouplingExtraction, EstimationError> {
    let omega = invert_rabi_from_tau(tau_off, fixed, opts)?;
    let g = invert_g_from_tau(tau_on, omega.value, fixed, opts)?;
    Ok(CouplingExtraction {
        omega_297: omega,
        g,
    })
}

/// Fitted repump time constant τ_D of the cavity repump sequence at full
/// intensity.
pub fn repump_time(
    p: &SystemParams,
    sequence: &PulseSequenceSpec,
    intensity_factor: f64,
) -> Result<FitResult, EstimationError> {
    let (traj, repumped) = simulate_repump_sequence(p, sequence, intensity_factor)?;
    let data = Dataset::new(traj.times, repumped)?;
    Ok(fit_tau_saturating(&data)?.require_converged()?)
}

/// 935 nm Rabi coupling giving a fitted repump time `target_tau` at full
/// intensity. The readout grid spans five target time constants.
pub fn calibrate_repump_drive(
    p: &SystemParams,
    target_tau: f64,
    rtol: f64,
) -> Result<f64, EstimationError> {
    if !(target_tau > 0.0 && target_tau.is_finite()) {
        return Err(EstimationError::InvalidTarget(format!(
            "target_tau = {target_tau}"
        )));
    }
    let sequence = PulseSequenceSpec::uniform(SequenceKind::CavityRepump, 5.0 * target_tau, 40)?;
    let gamma = p.gamma_total;
    let mut sim = CachedTau::new(|omega: f64| {
        let q = SystemParams {
            omega_935: omega,
            ..*p
        };
        Ok(repump_time(&q, &sequence, 1.0)?.value("tau"))
    });
    // weak-drive estimate: 1/τ = P_E · 2βΓ
    let p_e = 1.0 / (target_tau * 2.0 * p.beta * gamma);
    let cap = 50.0 * gamma;
    let est = if p_e < 0.45 {
        (p_e * gamma * gamma / (0.25 - 0.5 * p_e)).sqrt()
    } else {
        cap
    };
    let mut lo = est / 1.5;
    let mut hi = (est * 1.5).min(cap);
    while sim.tau(hi)? > target_tau {
        if hi >= cap {
            return Err(EstimationError::Unreachable {
                target: target_tau,
                tau_min: sim.tau(cap)?,
                tau_max: f64::INFINITY,
            });
        }
        lo = hi;
        hi = (hi * 2.0).min(cap);
    }
    while sim.tau(lo)? < target_tau {
        hi = lo;
        lo /= 2.0;
        if lo < 1e-6 * gamma {
            return Err(RootError::NoSignChange {
                a: lo,
                b: hi,
                fa: f64::NAN,
                fb: f64::NAN,
            }
            .into());
        }
    }
    brent(
        |x| Ok::<_, EstimationError>(sim.tau(x)? - target_tau),
        lo,
        hi,
        rtol * lo,
        60,
    )
}
