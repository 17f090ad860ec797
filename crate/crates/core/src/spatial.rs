// SPDX-License-Identifier: Apache-2.0

//! Spatial structure of the ion–cavity coupling.
//!
//! `x` is the cavity axis; `y` and `z` are transverse. The local repump
//! rate is taken proportional to the mode intensity (unsaturated drive).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::constants::{BOLTZMANN, TWO_PI};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpatialError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("contrast must lie in (0, 1), got {0}")]
    ContrastOutOfRange(f64),
    #[error("visibility must lie in [0, 1], got {0}")]
    VisibilityOutOfRange(f64),
    #[error("displacement coupling eta must lie in [0, 1), got {0}")]
    EtaOutOfRange(f64),
    #[error("relative noise must be >= 0, got {0}")]
    InvalidNoise(f64),
}

fn positive(name: &'static str, value: f64) -> Result<f64, SpatialError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(SpatialError::NonPositive { name, value })
    }
}

/// Standing-wave TEM₀₀ intensity with elliptical transverse profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFunction {
    /// 1/e² intensity radius along y, m.
    pub w_y: f64,
    /// 1/e² intensity radius along z, m.
    pub w_z: f64,
    /// Optical wavevector 2π/λ, rad/m.
    pub k: f64,
    pub y0: f64,
    pub z0: f64,
    /// Axial position of an antinode, m.
    pub axial_phase: f64,
}

impl ModeFunction {
    pub fn new(w_y: f64, w_z: f64, wavelength: f64) -> Result<Self, SpatialError> {
        positive("w_y", w_y)?;
        positive("w_z", w_z)?;
        positive("wavelength", wavelength)?;
        Ok(Self {
            w_y,
            w_z,
            k: TWO_PI / wavelength,
            y0: 0.0,
            z0: 0.0,
            axial_phase: 0.0,
        })
    }
}

/// `cos²(k(x − phase)) · exp(−2(y−y0)²/w_y²) · exp(−2(z−z0)²/w_z²)`.
/// Wavefront curvature is neglected.
pub fn mode_intensity(r: [f64; 3], m: &ModeFunction) -> f64 {
    let [x, y, z] = r;
    let axial = (m.k * (x - m.axial_phase)).cos().powi(2);
    let dy = (y - m.y0) / m.w_y;
    let dz = (z - m.z0) / m.w_z;
    axial * (-2.0 * (dy * dy + dz * dz)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSample {
    pub position: [f64; 3],
    /// Repump rate 1/τ_D, 1/s.
    pub rate: f64,
}

/// Multiplicative Gaussian noise `rate·(1 + relative·N(0,1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub relative: f64,
    pub seed: u64,
}

impl NoiseSpec {
    /// 15 % relative error per point.
    pub fn default_with_seed(seed: u64) -> Self {
        Self {
            relative: 0.15,
            seed,
        }
    }
}

/// Repump rates `peak_rate · M(r)` at each grid point. Deterministic for a
/// given seed.
pub fn simulate_scan(
    grid: &[[f64; 3]],
    m: &ModeFunction,
    peak_rate: f64,
    noise: Option<NoiseSpec>,
) -> Result<Vec<ScanSample>, SpatialError> {
    positive("peak_rate", peak_rate)?;
    let mut rng_noise = match noise {
        Some(n) if !(n.relative >= 0.0 && n.relative.is_finite()) => {
            return Err(SpatialError::InvalidNoise(n.relative))
        }
        Some(n) if n.relative > 0.0 => Some((
            ChaCha8Rng::seed_from_u64(n.seed),
            Normal::new(0.0, n.relative).expect("finite sigma"),
        )),
        _ => None,
    };
    Ok(grid
        .iter()
        .map(|&position| {
            let clean = peak_rate * mode_intensity(position, m);
            let rate = match rng_noise.as_mut() {
                Some((rng, normal)) => clean * (1.0 + normal.sample(rng)),
                None => clean,
            };
            ScanSample { position, rate }
        })
        .collect())
}

/// Row-major `n_y × n_z` transverse grid at axial position `x`, with `y`
/// varying slowest.
pub fn transverse_grid(
    x: f64,
    y: (f64, f64),
    z: (f64, f64),
    n_y: usize,
    n_z: usize,
) -> Vec<[f64; 3]> {
    let lin = |(a, b): (f64, f64), n: usize, i: usize| {
        if n <= 1 {
            a
        } else {
            a + (b - a) * i as f64 / (n - 1) as f64
        }
    };
    (0..n_y)
        .flat_map(|i| (0..n_z).map(move |j| [x, lin(y, n_y, i), lin(z, n_z, j)]))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContrastDefinition {
    /// `(max − min) / (max + min)`.
    PeakToPeakOverSum,
    /// `(max − min) / max`.
    PeakToPeakOverMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavevectorChoice {
    /// `k = 2π/λ`.
    Optical,
    /// `k = π/period`, using the standing-wave period seen in stage
    /// coordinates.
    ObservedPeriod,
}

impl WavevectorChoice {
    pub fn wavevector(self, wavelength: f64, observed_period: f64) -> f64 {
        match self {
            Self::Optical => TWO_PI / wavelength,
            Self::ObservedPeriod => std::f64::consts::PI / observed_period,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationModel {
    pub contrast_definition: ContrastDefinition,
    pub wavevector_choice: WavevectorChoice,
    /// RMS axial spread of the ion, m.
    pub sigma: f64,
}

/// Debye–Waller visibility `exp(−2k²σ²)`.
pub fn debye_waller(k: f64, sigma: f64) -> f64 {
    (-2.0 * k * k * sigma * sigma).exp()
}

/// `⟨cos²(kz)⟩` over a Gaussian of RMS width `model.sigma` centred at
/// `zbar`: `½(1 + e^(−2k²σ²) cos(2k z̄))`.
pub fn thermal_average_coupling(zbar: f64, model: &LocalizationModel, k: f64) -> f64 {
    0.5 * (1.0 + debye_waller(k, model.sigma) * (2.0 * k * zbar).cos())
}

/// Contrast of the smeared standing wave for visibility `v`.
pub fn contrast_from_visibility(v: f64, definition: ContrastDefinition) -> f64 {
    match definition {
        ContrastDefinition::PeakToPeakOverSum => v,
        ContrastDefinition::PeakToPeakOverMax => 2.0 * v / (1.0 + v),
    }
}

pub fn visibility_from_contrast(contrast: f64, definition: ContrastDefinition) -> f64 {
    match definition {
        ContrastDefinition::PeakToPeakOverSum => contrast,
        ContrastDefinition::PeakToPeakOverMax => contrast / (2.0 - contrast),
    }
}

/// RMS localization σ reproducing a standing-wave `contrast`:
/// `σ = √(ln(1/V) / (2k²))` with `V` the Debye–Waller visibility.
pub fn localization_from_contrast(
    contrast: f64,
    definition: ContrastDefinition,
    k: f64,
) -> Result<f64, SpatialError> {
    if !(contrast > 0.0 && contrast < 1.0) {
        return Err(SpatialError::ContrastOutOfRange(contrast));
    }
    positive("k", k)?;
    let v = visibility_from_contrast(contrast, definition);
    Ok(((1.0 / v).ln() / (2.0 * k * k)).sqrt())
}

/// One row of [`localization_table`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationEntry {
    pub definition: ContrastDefinition,
    pub wavevector: WavevectorChoice,
    pub k: f64,
    pub sigma: f64,
}

/// σ under every combination of contrast definition and wavevector.
pub fn localization_table(
    contrast: f64,
    wavelength: f64,
    observed_period: f64,
) -> Result<Vec<LocalizationEntry>, SpatialError> {
    positive("wavelength", wavelength)?;
    positive("observed_period", observed_period)?;
    let mut out = Vec::with_capacity(4);
    for wavevector in [WavevectorChoice::Optical, WavevectorChoice::ObservedPeriod] {
        for definition in [
            ContrastDefinition::PeakToPeakOverSum,
            ContrastDefinition::PeakToPeakOverMax,
        ] {
            let k = wavevector.wavevector(wavelength, observed_period);
            out.push(LocalizationEntry {
                definition,
                wavevector,
                k,
                sigma: localization_from_contrast(contrast, definition, k)?,
            });
        }
    }
    Ok(out)
}

/// Fraction of the cavity-assembly displacement by which the ion's trap
/// minimum follows the assembly along the cavity axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementCoupling {
    pub eta: f64,
}

impl DisplacementCoupling {
    pub fn new(eta: f64) -> Result<Self, SpatialError> {
        if !(0.0..1.0).contains(&eta) {
            return Err(SpatialError::EtaOutOfRange(eta));
        }
        Ok(Self { eta })
    }
}

/// Standing-wave period in stage coordinates, `(λ/2)/(1 − η)`.
pub fn observed_period(wavelength: f64, d: DisplacementCoupling) -> Result<f64, SpatialError> {
    positive("wavelength", wavelength)?;
    if !(0.0..1.0).contains(&d.eta) {
        return Err(SpatialError::EtaOutOfRange(d.eta));
    }
    Ok(0.5 * wavelength / (1.0 - d.eta))
}

/// Inverse of [`observed_period`] with first-order error propagation:
/// `η = 1 − λ/(2P)`, `δη = λ δP / (2P²)`.
pub fn displacement_from_period(
    wavelength: f64,
    period: f64,
    period_error: f64,
) -> Result<(DisplacementCoupling, f64), SpatialError> {
    positive("wavelength", wavelength)?;
    positive("period", period)?;
    let eta = 1.0 - wavelength / (2.0 * period);
    let d = DisplacementCoupling::new(eta)?;
    Ok((d, wavelength * period_error.abs() / (2.0 * period * period)))
}

/// Thermal RMS spread `√(k_B T / (m ω²))` of a harmonically trapped ion.
pub fn thermal_localization(
    temperature: f64,
    mass: f64,
    omega_trap: f64,
) -> Result<f64, SpatialError> {
    positive("temperature", temperature)?;
    positive("mass", mass)?;
    positive("omega_trap", omega_trap)?;
    Ok((BOLTZMANN * temperature / (mass * omega_trap * omega_trap)).sqrt())
}

/// Coupling seen at an antinode once the standing wave is smeared to
/// visibility `v`: `g_peak √((1 + V)/2)`.
pub fn max_visible_coupling(g_peak: f64, visibility: f64) -> Result<f64, SpatialError> {
    positive("g_peak", g_peak)?;
    if !(0.0..=1.0).contains(&visibility) {
        return Err(SpatialError::VisibilityOutOfRange(visibility));
    }
    Ok(g_peak * ((1.0 + visibility) / 2.0).sqrt())
}

/// Smeared repump rate versus stage displacement: the ion sits at
/// `z̄ = (1 − η)·s` relative to the standing wave.
pub fn standing_wave_scan(
    stage_positions: &[f64],
    model: &LocalizationModel,
    k: f64,
    d: DisplacementCoupling,
    peak_rate: f64,
) -> Vec<f64> {
    stage_positions
        .iter()
        .map(|s| peak_rate * thermal_average_coupling((1.0 - d.eta) * s, model, k))
        .collect()
}
