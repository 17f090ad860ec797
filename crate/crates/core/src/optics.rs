// SPDX-License-Identifier: Apache-2.0

//! Closed-form Fabry–Pérot relations: free spectral range, linewidth,
//! Gaussian mode waist, mode volume, single-photon coupling, cooperativity
//! and the solid angle subtended by the cavity mode.
//!
//! Rates are angular (rad/s). `κ` and `Γ` are amplitude decay rates, so the
//! intracavity photon number decays at `2κ`.

use thiserror::Error;

use crate::constants::{HBAR, SPEED_OF_LIGHT, TWO_PI, VACUUM_PERMITTIVITY};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("resonator is not strictly stable: g1*g2 = {g1g2}")]
    Unstable { g1g2: f64 },
    #[error("waist {waist:e} m must exceed the wavelength {wavelength:e} m")]
    WaistBelowWavelength { waist: f64, wavelength: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<f64, OpticsError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(OpticsError::NonPositive { name, value })
    }
}

/// Two-mirror resonator. Mirror radii may be `f64::INFINITY` for a plane
/// mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    pub length: f64,
    pub wavelength: f64,
    pub roc_1: f64,
    pub roc_2: f64,
    pub finesse: f64,
}

impl CavityGeometry {
    pub fn new(
        length: f64,
        wavelength: f64,
        roc_1: f64,
        roc_2: f64,
        finesse: f64,
    ) -> Result<Self, OpticsError> {
        positive("length", length)?;
        positive("wavelength", wavelength)?;
        positive("finesse", finesse)?;
        for (name, r) in [("roc_1", roc_1), ("roc_2", roc_2)] {
            if !(r > 0.0) {
                return Err(OpticsError::NonPositive { name, value: r });
            }
        }
        let geo = Self {
            length,
            wavelength,
            roc_1,
            roc_2,
            finesse,
        };
        let g1g2 = geo.stability_product();
        if !(0.0..=1.0).contains(&g1g2) {
            return Err(OpticsError::Unstable { g1g2 });
        }
        Ok(geo)
    }

    /// Symmetric cavity with both mirrors of radius `roc`.
    pub fn symmetric(
        length: f64,
        wavelength: f64,
        roc: f64,
        finesse: f64,
    ) -> Result<Self, OpticsError> {
        Self::new(length, wavelength, roc, roc, finesse)
    }

    /// 230 µm cavity at 935 nm, F = 1000, with R = 350 µm mirrors (the
    /// radius that yields a 7 µm waist).
    pub fn fiber_cavity_default() -> Self {
        Self::symmetric(230e-6, 935e-9, 350e-6, 1000.0).expect("default geometry is stable")
    }

    /// Resonator g-parameters `(1 − L/R₁, 1 − L/R₂)`.
    pub fn g_parameters(&self) -> (f64, f64) {
        (
            1.0 - self.length / self.roc_1,
            1.0 - self.length / self.roc_2,
        )
    }

    pub fn stability_product(&self) -> f64 {
        let (g1, g2) = self.g_parameters();
        g1 * g2
    }

    pub fn angular_frequency(&self) -> f64 {
        TWO_PI * SPEED_OF_LIGHT / self.wavelength
    }
}

/// Transition dipole moment in C·m.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DipoleMoment(pub f64);

/// `c / 2L` in Hz.
pub fn free_spectral_range(geo: &CavityGeometry) -> f64 {
    SPEED_OF_LIGHT / (2.0 * geo.length)
}

/// Field decay rate `κ = 2π·FSR / (2F)` in rad/s (half the FWHM linewidth).
pub fn kappa_from_finesse(geo: &CavityGeometry) -> f64 {
    TWO_PI * free_spectral_range(geo) / (2.0 * geo.finesse)
}

/// Inverse of [`kappa_from_finesse`].
pub fn finesse_from_kappa(geo: &CavityGeometry, kappa: f64) -> Result<f64, OpticsError> {
    positive("kappa", kappa)?;
    Ok(TWO_PI * free_spectral_range(geo) / (2.0 * kappa))
}

/// Fundamental-mode 1/e² intensity waist radius.
pub fn waist_from_geometry(geo: &CavityGeometry) -> Result<f64, OpticsError> {
    let (g1, g2) = geo.g_parameters();
    let g1g2 = g1 * g2;
    let lambda_over_pi = geo.wavelength / std::f64::consts::PI;
    let symmetric = (geo.roc_1 - geo.roc_2).abs() <= 1e-12 * geo.roc_1.min(geo.roc_2)
        || (geo.roc_1.is_infinite() && geo.roc_2.is_infinite());
    if symmetric {
        // w0² = (λ/2π) √(L(2R − L)); the confocal point g = 0 is regular.
        if !(0.0..1.0).contains(&g1g2) {
            return Err(OpticsError::Unstable { g1g2 });
        }
        let r = geo.roc_1;
        let w0_sq = geo.wavelength / TWO_PI * (geo.length * (2.0 * r - geo.length)).sqrt();
        return Ok(w0_sq.sqrt());
    }
    if !(g1g2 > 0.0 && g1g2 < 1.0) {
        return Err(OpticsError::Unstable { g1g2 });
    }
    let w0_sq =
        lambda_over_pi * geo.length * (g1g2 * (1.0 - g1g2)).sqrt() / (g1 + g2 - 2.0 * g1g2).abs();
    Ok(w0_sq.sqrt())
}

/// Effective volume `π w² L / 4` of a Gaussian standing-wave mode.
pub fn mode_volume(waist: f64, length: f64) -> f64 {
    std::f64::consts::PI * waist * waist * length / 4.0
}

/// Geometric mean of two transverse waists.
pub fn effective_waist(w_y: f64, w_z: f64) -> f64 {
    (w_y * w_z).sqrt()
}

/// Peak single-photon coupling `g = d √(4c / (ħ ε₀ λ w² L))` in rad/s.
pub fn coupling_from_dipole(
    d: DipoleMoment,
    geo: &CavityGeometry,
    waist: f64,
) -> Result<f64, OpticsError> {
    positive("dipole moment", d.0)?;
    positive("waist", waist)?;
    Ok(d.0 * coupling_per_dipole(geo, waist))
}

/// Inverse of [`coupling_from_dipole`].
pub fn dipole_from_coupling(
    g: f64,
    geo: &CavityGeometry,
    waist: f64,
) -> Result<DipoleMoment, OpticsError> {
    positive("coupling", g)?;
    positive("waist", waist)?;
    Ok(DipoleMoment(g / coupling_per_dipole(geo, waist)))
}

fn coupling_per_dipole(geo: &CavityGeometry, waist: f64) -> f64 {
    (4.0 * SPEED_OF_LIGHT
        / (HBAR * VACUUM_PERMITTIVITY * geo.wavelength * waist * waist * geo.length))
        .sqrt()
}

/// Cooperativity `C = g² / (κ Γ)` with amplitude decay rates.
pub fn cooperativity(g: f64, kappa: f64, gamma: f64) -> Result<f64, OpticsError> {
    positive("g", g)?;
    positive("kappa", kappa)?;
    positive("gamma", gamma)?;
    Ok(g * g / (kappa * gamma))
}

/// Fraction `θ²/4` of the full solid angle covered by the mode, with
/// far-field half-angle divergence `θ = λ / (π w)`.
pub fn solid_angle_fraction(waist: f64, wavelength: f64) -> Result<f64, OpticsError> {
    positive("waist", waist)?;
    if !(wavelength >= 0.0) {
        return Err(OpticsError::NonPositive {
            name: "wavelength",
            value: wavelength,
        });
    }
    if waist <= wavelength {
        return Err(OpticsError::WaistBelowWavelength { waist, wavelength });
    }
    let theta = wavelength / (std::f64::consts::PI * waist);
    Ok(theta * theta / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn paper_geo() -> CavityGeometry {
        CavityGeometry::fiber_cavity_default()
    }

    #[test]
    fn fsr_of_230_um_cavity() {
        let fsr = free_spectral_range(&paper_geo());
        assert_relative_eq!(fsr, 651.7e9, max_relative = 1e-4);
        // the quoted figure is 650 GHz
        assert!((fsr / 650e9 - 1.0).abs() < 0.005);
    }

    #[test]
    fn fsr_scaling_and_one_metre() {
        let mut geo = paper_geo();
        let f1 = free_spectral_range(&geo);
        geo.length *= 2.0;
        assert_relative_eq!(free_spectral_range(&geo), f1 / 2.0, max_relative = 1e-15);
        geo.length = 1.0;
        assert_relative_eq!(free_spectral_range(&geo), 149.896229e6, max_relative = 1e-9);
    }

    #[test]
    fn kappa_from_finesse_matches_measurement() {
        let geo = paper_geo();
        let kappa = kappa_from_finesse(&geo);
        assert_relative_eq!(kappa / TWO_PI, 325.86e6, max_relative = 1e-4);
        assert!((kappa / (TWO_PI * 320e6) - 1.0).abs() < 0.02);
        let mut geo2 = geo;
        geo2.finesse *= 2.0;
        assert_relative_eq!(kappa_from_finesse(&geo2), kappa / 2.0, max_relative = 1e-15);
        assert_relative_eq!(
            finesse_from_kappa(&geo, kappa).unwrap(),
            1000.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn symmetric_waist() {
        let w0 = waist_from_geometry(&paper_geo()).unwrap();
        assert_relative_eq!(w0, 7.0e-6, max_relative = 0.002);
    }

    #[test]
    fn confocal_waist() {
        let geo = CavityGeometry::symmetric(230e-6, 935e-9, 230e-6, 1000.0).unwrap();
        let w0 = waist_from_geometry(&geo).unwrap();
        assert_relative_eq!(w0 * w0, 935e-9 * 230e-6 / TWO_PI, max_relative = 1e-12);
    }

    #[test]
    fn planar_cavity_is_marginal() {
        let geo = CavityGeometry::symmetric(230e-6, 935e-9, f64::INFINITY, 1000.0).unwrap();
        assert!(matches!(
            waist_from_geometry(&geo),
            Err(OpticsError::Unstable { .. })
        ));
    }

    #[test]
    fn general_formula_agrees_near_symmetric() {
        let a = CavityGeometry::new(230e-6, 935e-9, 350e-6, 350e-6 * (1.0 + 1e-6), 1000.0).unwrap();
        let w_general = waist_from_geometry(&a).unwrap();
        let w_sym = waist_from_geometry(&paper_geo()).unwrap();
        assert_relative_eq!(w_general, w_sym, max_relative = 1e-5);
    }

    #[test]
    fn unstable_geometry_rejected() {
        assert!(matches!(
            CavityGeometry::symmetric(800e-6, 935e-9, 350e-6, 1000.0),
            Err(OpticsError::Unstable { .. })
        ));
    }

    #[test]
    fn mode_volume_values() {
        let v = mode_volume(7e-6, 230e-6);
        assert_relative_eq!(v * 1e18, 8.851e3, max_relative = 1e-3);
        assert_relative_eq!(mode_volume(14e-6, 230e-6), 4.0 * v, max_relative = 1e-15);
    }

    #[test]
    fn dipole_for_six_mhz() {
        let geo = paper_geo();
        let d = DipoleMoment(3.42e-30);
        let g = coupling_from_dipole(d, &geo, 7e-6).unwrap();
        assert!(
            (g / (TWO_PI * 6.0e6) - 1.0).abs() < 0.01,
            "g/2π = {}",
            g / TWO_PI
        );
        let g2 = coupling_from_dipole(d, &geo, 14e-6).unwrap();
        assert_relative_eq!(g2, g / 2.0, max_relative = 1e-14);
        let back = dipole_from_coupling(g, &geo, 7e-6).unwrap();
        assert_relative_eq!(back.0, d.0, max_relative = 1e-12);
    }

    #[test]
    fn cooperativity_values() {
        let c = cooperativity(TWO_PI * 6e6, TWO_PI * 320e6, TWO_PI * 2e6).unwrap();
        assert_relative_eq!(c, 0.05625, max_relative = 1e-12);
        let c2 = cooperativity(TWO_PI * 12e6, TWO_PI * 320e6, TWO_PI * 2e6).unwrap();
        assert_relative_eq!(c2, 4.0 * c, max_relative = 1e-12);
        let c_meas = cooperativity(TWO_PI * 3.4e6, TWO_PI * 320e6, TWO_PI * 2e6).unwrap();
        assert_relative_eq!(c_meas, 0.0180625, max_relative = 1e-12);
    }

    #[test]
    fn solid_angle_values() {
        let f = solid_angle_fraction(7e-6, 935e-9).unwrap();
        assert_relative_eq!(f, 4.52e-4, max_relative = 0.01);
        assert!((f / 4e-4 - 1.0).abs() < 0.15);
        assert_relative_eq!(
            solid_angle_fraction(14e-6, 935e-9).unwrap(),
            f / 4.0,
            max_relative = 1e-14
        );
        assert_eq!(solid_angle_fraction(7e-6, 0.0).unwrap(), 0.0);
        assert!(solid_angle_fraction(500e-9, 935e-9).is_err());
    }
}
