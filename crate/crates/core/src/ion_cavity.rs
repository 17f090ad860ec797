// SPDX-License-Identifier: Apache-2.0

//! Yb⁺ Λ-system (S, E = D[3/2]₁/₂, D = D₃/₂) coupled to one cavity mode.
//!
//! The 297 nm laser drives S ↔ E with Rabi coupling `omega_297`, the cavity
//! vacuum couples E ↔ D with strength `g`. E decays to S with branching
//! fraction `beta` and to D otherwise. All rates are angular (rad/s) and
//! `kappa`, `gamma_total` are amplitude decay rates.

use thiserror::Error;

use crate::constants::TWO_PI;
use crate::lindblad::{
    build_liouvillian, build_operators, evolve, DensityState, EvolveOptions, HilbertConfig, Level,
    LindbladError, Liouvillian, OperatorMatrix, Trajectory,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("Hilbert space cutoff {cfg} does not match parameter n_max {params}")]
    CutoffMismatch { cfg: usize, params: usize },
    #[error("pulse sequence kind {found:?} cannot be used here (expected {expected:?})")]
    WrongSequence {
        expected: SequenceKind,
        found: SequenceKind,
    },
    #[error(transparent)]
    Lindblad(#[from] LindbladError),
}

fn invalid(name: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Rabi coupling of the 297 nm laser, `H ⊃ (Ω/2)(|E⟩⟨S| + h.c.)`.
    pub omega_297: f64,
    /// Single-photon coupling on E ↔ D.
    pub g: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Total dipole decay rate of E.
    pub gamma_total: f64,
    /// Fraction of E population decay that returns to S.
    pub beta: f64,
    /// Detuning of the 297 nm laser from S ↔ E.
    pub delta_laser: f64,
    /// Detuning of the cavity from E ↔ D.
    pub delta_cavity: f64,
    pub n_max: usize,
    /// Classical Rabi coupling of intracavity 935 nm light on D ↔ E.
    pub omega_935: f64,
}

impl Default for SystemParams {
    /// Measured values of the fiber-cavity experiment with a literature
    /// branching fraction.
    fn default() -> Self {
        Self {
            omega_297: TWO_PI * 1.13e6,
            g: TWO_PI * 3.4e6,
            kappa: TWO_PI * 320e6,
            gamma_total: TWO_PI * 2.0e6,
            beta: 0.982,
            delta_laser: 0.0,
            delta_cavity: 0.0,
            n_max: 1,
            omega_935: 0.0,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("omega_297", self.omega_297),
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma_total", self.gamma_total),
            ("omega_935", self.omega_935),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(
                    name,
                    format!("must be a finite rate >= 0, got {v}"),
                ));
            }
        }
        for (name, v) in [
            ("delta_laser", self.delta_laser),
            ("delta_cavity", self.delta_cavity),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(invalid(
                "beta",
                format!("must lie in (0, 1), got {}", self.beta),
            ));
        }
        if self.g > 0.0 && self.n_max < 1 {
            return Err(invalid("n_max", "must be >= 1 when g > 0"));
        }
        Ok(())
    }

    pub fn hilbert_config(&self) -> HilbertConfig {
        HilbertConfig::new(self.n_max)
    }

    /// Copy with the cavity coupling removed and the photon factor
    /// truncated to vacuum. With `g = 0` the cavity is decoupled, so this
    /// leaves the atomic dynamics unchanged.
    pub fn without_cavity(&self) -> Self {
        Self {
            g: 0.0,
            n_max: 0,
            ..*self
        }
    }
}

/// Hamiltonian and collapse operators of the ion–cavity system.
#[derive(Debug, Clone)]
pub struct IonCavitySystem {
    pub hamiltonian: OperatorMatrix,
    pub collapses: Vec<OperatorMatrix>,
    pub config: HilbertConfig,
}

impl IonCavitySystem {
    pub fn liouvillian(&self) -> Result<Liouvillian, LindbladError> {
        build_liouvillian(&self.hamiltonian, &self.collapses)
    }
}

/// ```text
/// H = Δ_L |E⟩⟨E| + Δ_C a†a + (Ω₂₉₇/2)(|E⟩⟨S| + h.c.)
///     + g(|E⟩⟨D| a + |D⟩⟨E| a†) + (Ω₉₃₅/2)(|E⟩⟨D| + h.c.)
/// C = { √(2βΓ) |S⟩⟨E|, √(2(1−β)Γ) |D⟩⟨E|, √(2κ) a }
/// ```
pub fn build_system(p: &SystemParams, cfg: HilbertConfig) -> Result<IonCavitySystem, ModelError> {
    p.validate()?;
    if cfg.n_max() != p.n_max {
        return Err(ModelError::CutoffMismatch {
            cfg: cfg.n_max(),
            params: p.n_max,
        });
    }
    let ops = build_operators(cfg);
    let es = ops.transition(Level::E, Level::S);
    let ed = ops.transition(Level::E, Level::D);
    let de = ops.transition(Level::D, Level::E);

    let mut h = &ops.projector(Level::E).scaled(p.delta_laser) + &ops.number.scaled(p.delta_cavity);
    h = &h + &(&es + &es.adjoint()).scaled(p.omega_297 / 2.0);
    let cavity = &(&ed * &ops.a) + &(&de * &ops.a_dag());
    h = &h + &cavity.scaled(p.g);
    if p.omega_935 != 0.0 {
        h = &h + &(&ed + &de).scaled(p.omega_935 / 2.0);
    }

    let collapses = vec![
        ops.transition(Level::S, Level::E)
            .scaled((2.0 * p.beta * p.gamma_total).sqrt()),
        de.scaled((2.0 * (1.0 - p.beta) * p.gamma_total).sqrt()),
        ops.a.scaled((2.0 * p.kappa).sqrt()),
    ];
    Ok(IonCavitySystem {
        hamiltonian: h,
        collapses,
        config: cfg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    /// 297 nm drive with the cavity vacuum on the other leg; starts in S.
    LambdaDrive,
    /// 935 nm light on the cavity mode repumps out of D.
    CavityRepump,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequenceSpec {
    pub kind: SequenceKind,
    /// Length of the (ideal) initialization pulse in seconds.
    pub init_duration: f64,
    /// Drive durations at which the detection observable is read, seconds.
    pub drive_times: Vec<f64>,
    pub detection: Level,
}

impl PulseSequenceSpec {
    pub fn new(
        kind: SequenceKind,
        init_duration: f64,
        drive_times: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if !(init_duration >= 0.0) {
            return Err(invalid("init_duration", "must be >= 0"));
        }
        if drive_times.is_empty()
            || drive_times.iter().any(|t| !(*t >= 0.0) || !t.is_finite())
            || drive_times.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(invalid(
                "drive_times",
                "must be non-empty, >= 0 and strictly increasing",
            ));
        }
        let detection = match kind {
            SequenceKind::LambdaDrive => Level::S,
            SequenceKind::CavityRepump => Level::D,
        };
        Ok(Self {
            kind,
            init_duration,
            drive_times,
            detection,
        })
    }

    /// Λ-drive readout every 2 µs from 2 µs to 100 µs after a 5 µs cleanout.
    /// The first microsecond, where E fills up, is skipped.
    pub fn lambda_default() -> Self {
        let times = (1..=50).map(|i| i as f64 * 2e-6).collect();
        Self::new(SequenceKind::LambdaDrive, 5e-6, times).expect("static grid")
    }

    /// Uniform grid `t_max/n, 2 t_max/n, …, t_max`.
    pub fn uniform(kind: SequenceKind, t_max: f64, n: usize) -> Result<Self, ModelError> {
        let times = (1..=n).map(|i| i as f64 * t_max / n as f64).collect();
        Self::new(kind, 5e-6, times)
    }
}

fn check_kind(spec: &PulseSequenceSpec, expected: SequenceKind) -> Result<(), ModelError> {
    if spec.kind != expected {
        return Err(ModelError::WrongSequence {
            expected,
            found: spec.kind,
        });
    }
    Ok(())
}

/// Runs the Λ-drive from `|S, 0⟩` and returns the full trajectory; `P_S` is
/// `trajectory.population(Level::S)`.
pub fn simulate_lambda_sequence(
    p: &SystemParams,
    spec: &PulseSequenceSpec,
) -> Result<Trajectory, ModelError> {
    simulate_lambda_sequence_with(p, spec, &EvolveOptions::default())
}

pub fn simulate_lambda_sequence_with(
    p: &SystemParams,
    spec: &PulseSequenceSpec,
    opts: &EvolveOptions,
) -> Result<Trajectory, ModelError> {
    check_kind(spec, SequenceKind::LambdaDrive)?;
    p.validate()?;
    let run = SystemParams {
        omega_935: 0.0,
        ..effective(p)
    };
    evolve_from(&run, Level::S, &spec.drive_times, opts)
}

/// Runs the cavity repump from `|D, 0⟩` with the 297 nm laser off and the
/// 935 nm coupling scaled to `omega_935·√intensity_factor`. Returns the
/// trajectory together with `P_repumped = 1 − P_D` at each time.
pub fn simulate_repump_sequence(
    p: &SystemParams,
    spec: &PulseSequenceSpec,
    intensity_factor: f64,
) -> Result<(Trajectory, Vec<f64>), ModelError> {
    check_kind(spec, SequenceKind::CavityRepump)?;
    p.validate()?;
    if !(0.0..=1.0).contains(&intensity_factor) {
        return Err(invalid(
            "intensity_factor",
            format!("must lie in [0, 1], got {intensity_factor}"),
        ));
    }
    let run = SystemParams {
        omega_297: 0.0,
        omega_935: p.omega_935 * intensity_factor.sqrt(),
        ..effective(p)
    };
    let traj = evolve_from(&run, Level::D, &spec.drive_times, &EvolveOptions::default())?;
    let repumped = traj
        .populations
        .iter()
        .map(|pop| 1.0 - pop[Level::D.index()])
        .collect();
    Ok((traj, repumped))
}

/// Free decay of `|E, 0⟩` with all lasers off.
pub fn simulate_excited_state_decay(
    p: &SystemParams,
    times: &[f64],
) -> Result<Trajectory, ModelError> {
    p.validate()?;
    let run = SystemParams {
        omega_297: 0.0,
        omega_935: 0.0,
        ..effective(p)
    };
    evolve_from(&run, Level::E, times, &EvolveOptions::default())
}

fn effective(p: &SystemParams) -> SystemParams {
    if p.g == 0.0 {
        p.without_cavity()
    } else {
        *p
    }
}

fn evolve_from(
    p: &SystemParams,
    level: Level,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory, ModelError> {
    let cfg = p.hilbert_config();
    let l = build_system(p, cfg)?.liouvillian()?;
    let rho0 = DensityState::basis_state(cfg, level, 0);
    Ok(evolve(&rho0, &l, times, opts)?)
}

/// Closed-form rates for the bad-cavity, weak-drive limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticRates {
    /// Steady-state E population of the driven S ↔ E transition.
    pub p_e_weak: f64,
    /// Cavity-induced E → D population rate `2g²/κ`.
    pub purcell_pop_rate: f64,
    /// Λ-transfer time without the cavity channel.
    pub tau_off_estimate: f64,
    /// Λ-transfer time with the resonant cavity channel.
    pub tau_on_estimate: f64,
    /// Set when κ ≫ g, Γ or Ω ≲ Γ does not hold, or the cavity is detuned.
    pub regime_warning: bool,
}

pub fn analytic_rates(p: &SystemParams) -> AnalyticRates {
    let omega_sq = p.omega_297 * p.omega_297;
    let p_e_weak = (omega_sq / 4.0)
        / (p.delta_laser * p.delta_laser + p.gamma_total * p.gamma_total + omega_sq / 2.0);
    let purcell_pop_rate = if p.kappa > 0.0 {
        2.0 * p.g * p.g / p.kappa
    } else {
        f64::INFINITY
    };
    let leak = 2.0 * (1.0 - p.beta) * p.gamma_total;
    let regime_warning = p.kappa < 50.0 * p.g.max(p.gamma_total)
        || p.omega_297 > p.gamma_total
        || p.delta_cavity != 0.0;
    AnalyticRates {
        p_e_weak,
        purcell_pop_rate,
        tau_off_estimate: 1.0 / (p_e_weak * leak),
        tau_on_estimate: 1.0 / (p_e_weak * (leak + purcell_pop_rate)),
        regime_warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hamiltonian_is_hermitian() {
        let p = SystemParams {
            delta_laser: 1e5,
            delta_cavity: -3e6,
            omega_935: 2e6,
            n_max: 2,
            ..Default::default()
        };
        let sys = build_system(&p, p.hilbert_config()).unwrap();
        assert!(sys.hamiltonian.hermiticity_error() <= 1e-12);
        assert_eq!(sys.collapses.len(), 3);
    }

    #[test]
    fn cutoff_mismatch_rejected() {
        let p = SystemParams::default();
        assert!(matches!(
            build_system(&p, HilbertConfig::new(3)),
            Err(ModelError::CutoffMismatch { .. })
        ));
    }

    #[test]
    fn invalid_params_rejected() {
        let bad_beta = SystemParams {
            beta: 1.0,
            ..Default::default()
        };
        assert!(bad_beta.validate().is_err());
        let no_photons = SystemParams {
            n_max: 0,
            ..Default::default()
        };
        assert!(no_photons.validate().is_err());
        let negative = SystemParams {
            kappa: -1.0,
            ..Default::default()
        };
        assert!(negative.validate().is_err());
    }

    #[test]
    fn decoupled_photon_factor_leaves_atom_unchanged() {
        let with_photon = SystemParams {
            g: 0.0,
            n_max: 1,
            ..Default::default()
        };
        let bare = SystemParams {
            g: 0.0,
            n_max: 0,
            ..Default::default()
        };
        let times: Vec<f64> = (1..=10).map(|i| i as f64 * 0.2e-6).collect();
        let opts = EvolveOptions {
            rtol: 1e-13,
            atol: 1e-15,
            ..Default::default()
        };
        let a = evolve_from(&with_photon, Level::S, &times, &opts).unwrap();
        let b = evolve_from(&bare, Level::S, &times, &opts).unwrap();
        for (pa, pb) in a.populations.iter().zip(&b.populations) {
            for k in 0..3 {
                assert!((pa[k] - pb[k]).abs() < 1e-12, "{pa:?} vs {pb:?}");
            }
        }
    }

    #[test]
    fn no_drive_keeps_ground_state() {
        let p = SystemParams {
            omega_297: 0.0,
            ..Default::default()
        };
        let spec = PulseSequenceSpec::uniform(SequenceKind::LambdaDrive, 5e-6, 5).unwrap();
        let traj = simulate_lambda_sequence(&p, &spec).unwrap();
        for ps in traj.population(Level::S) {
            assert!((ps - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_intensity_does_not_repump() {
        let p = SystemParams {
            omega_935: TWO_PI * 1e6,
            g: 0.0,
            ..Default::default()
        };
        let spec = PulseSequenceSpec::uniform(SequenceKind::CavityRepump, 2e-6, 4).unwrap();
        let (_, repumped) = simulate_repump_sequence(&p, &spec, 0.0).unwrap();
        assert!(repumped.iter().all(|r| r.abs() < 1e-12));
        assert!(simulate_repump_sequence(&p, &spec, 1.5).is_err());
    }

    #[test]
    fn sequence_kind_is_checked() {
        let p = SystemParams::default();
        let spec = PulseSequenceSpec::uniform(SequenceKind::CavityRepump, 1e-6, 2).unwrap();
        assert!(matches!(
            simulate_lambda_sequence(&p, &spec),
            Err(ModelError::WrongSequence { .. })
        ));
    }

    #[test]
    fn purcell_rate_value() {
        let r = analytic_rates(&SystemParams::default());
        assert_relative_eq!(r.purcell_pop_rate / TWO_PI, 72.25e3, max_relative = 1e-9);
        assert!(r.tau_on_estimate < r.tau_off_estimate);
        assert!(!r.regime_warning);
        let doubled = analytic_rates(&SystemParams {
            g: 2.0 * TWO_PI * 3.4e6,
            ..Default::default()
        });
        assert_relative_eq!(
            doubled.purcell_pop_rate,
            4.0 * r.purcell_pop_rate,
            max_relative = 1e-12
        );
    }

    #[test]
    fn vanishing_drive_gives_infinite_times() {
        let r = analytic_rates(&SystemParams {
            omega_297: 0.0,
            ..Default::default()
        });
        assert!(r.tau_off_estimate.is_infinite() && r.tau_on_estimate.is_infinite());
    }

    #[test]
    fn bad_spec_rejected() {
        assert!(PulseSequenceSpec::new(SequenceKind::LambdaDrive, 0.0, vec![2.0, 1.0]).is_err());
        assert!(PulseSequenceSpec::new(SequenceKind::LambdaDrive, -1.0, vec![1.0]).is_err());
    }
}
