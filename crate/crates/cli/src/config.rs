// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` run configuration.
//!
//! Frequencies are read as ν = ω/2π in MHz and converted to rad/s once,
//! here. Lengths carry their unit in the key name.

use std::fmt::Write as _;
use std::path::PathBuf;

use ioncav::constants::TWO_PI;
use ioncav::ion_cavity::SystemParams;
use ioncav::optics::CavityGeometry;
use ioncav::spatial::{ContrastDefinition, WavevectorChoice};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected 'key = value'")]
    Malformed { line: usize },
    #[error("line {line}: cannot parse '{value}' for '{key}'")]
    Unparsable {
        line: usize,
        key: String,
        value: String,
    },
    #[error("line {line}: {key} = {value} out of range ({reason})")]
    OutOfRange {
        line: usize,
        key: String,
        value: String,
        reason: &'static str,
    },
    #[error("line {line}: duplicate key '{key}'")]
    Duplicate { line: usize, key: String },
    #[error("inconsistent configuration: {0}")]
    Inconsistent(String),
}

impl ConfigError {
    /// Offending line, when the error is tied to one.
    pub fn line(&self) -> Option<usize> {
        match self {
            Self::UnknownKey { line, .. }
            | Self::Malformed { line }
            | Self::Unparsable { line, .. }
            | Self::OutOfRange { line, .. }
            | Self::Duplicate { line, .. } => Some(*line),
            Self::Inconsistent(_) => None,
        }
    }
}

const MHZ: f64 = TWO_PI * 1e6;

/// Angular frequency from a value in MHz, rounded like `TWO_PI * 320e6`.
fn mhz(v: f64) -> f64 {
    TWO_PI * (v * 1e6)
}

/// Typed configuration in SI units (angular frequencies in rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemParams,
    pub cavity: CavityGeometry,
    /// Effective mode waist used for the solid angle and mode volume, m.
    pub waist: f64,
    pub waist_y: f64,
    pub waist_z: f64,
    /// Peak coupling at an antinode, rad/s.
    pub g_peak: f64,
    pub noise_seed: u64,
    pub noise_relative: f64,
    pub tau_off: f64,
    pub tau_on: f64,
    /// Unsaturated repump time constant at the mode centre, s.
    pub repump_tau: f64,
    pub scan_half_width: f64,
    pub scan_points: usize,
    pub contrast: f64,
    pub contrast_definition: ContrastDefinition,
    pub wavevector: WavevectorChoice,
    pub eta: f64,
    pub stage_range: f64,
    pub stage_points: usize,
    pub temperature: f64,
    pub trap_frequency: f64,
    pub ion_mass_u: f64,
    pub data_file: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: SystemParams::default(),
            cavity: CavityGeometry::fiber_cavity_default(),
            waist: 7e-6,
            waist_y: 7.6e-6,
            waist_z: 6.6e-6,
            g_peak: mhz(6.0),
            noise_seed: 0,
            noise_relative: 0.15,
            tau_off: 34e-6,
            tau_on: 17.2e-6,
            repump_tau: 500e-9,
            scan_half_width: 20e-6,
            scan_points: 41,
            contrast: 0.4,
            contrast_definition: ContrastDefinition::PeakToPeakOverSum,
            wavevector: WavevectorChoice::Optical,
            eta: 0.339,
            stage_range: 2e-6,
            stage_points: 201,
            temperature: 0.5e-3,
            trap_frequency: TWO_PI * 1.3e6,
            ion_mass_u: 171.0,
            data_file: None,
        }
    }
}

/// Accepted keys, in serialization order.
pub const KEYS: &[&str] = &[
    "omega_297_mhz",
    "g_mhz",
    "kappa_mhz",
    "gamma_mhz",
    "beta",
    "delta_laser_mhz",
    "delta_cavity_mhz",
    "omega_935_mhz",
    "n_max",
    "cavity_length_um",
    "wavelength_nm",
    "roc_um",
    "finesse",
    "waist_um",
    "waist_y_um",
    "waist_z_um",
    "g_peak_mhz",
    "noise_seed",
    "noise_relative",
    "tau_off_us",
    "tau_on_us",
    "repump_tau_ns",
    "scan_half_width_um",
    "scan_points",
    "contrast",
    "contrast_definition",
    "wavevector",
    "eta",
    "stage_range_um",
    "stage_points",
    "temperature_mk",
    "trap_frequency_mhz",
    "ion_mass_u",
    "data_file",
];

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl Entry<'_> {
    fn unparsable(&self) -> ConfigError {
        ConfigError::Unparsable {
            line: self.line,
            key: self.key.into(),
            value: self.value.into(),
        }
    }

    fn range(&self, reason: &'static str) -> ConfigError {
        ConfigError::OutOfRange {
            line: self.line,
            key: self.key.into(),
            value: self.value.into(),
            reason,
        }
    }

    fn float(&self) -> Result<f64, ConfigError> {
        let v: f64 = self.value.parse().map_err(|_| self.unparsable())?;
        if !v.is_finite() {
            return Err(self.unparsable());
        }
        Ok(v)
    }

    fn non_negative(&self) -> Result<f64, ConfigError> {
        let v = self.float()?;
        if v < 0.0 {
            return Err(self.range("must be >= 0"));
        }
        Ok(v)
    }

    fn positive(&self) -> Result<f64, ConfigError> {
        let v = self.float()?;
        if v <= 0.0 {
            return Err(self.range("must be > 0"));
        }
        Ok(v)
    }

    fn open_unit(&self) -> Result<f64, ConfigError> {
        let v = self.float()?;
        if !(v > 0.0 && v < 1.0) {
            return Err(self.range("must lie in (0, 1)"));
        }
        Ok(v)
    }

    fn count(&self, min: usize) -> Result<usize, ConfigError> {
        let v: usize = self.value.parse().map_err(|_| self.unparsable())?;
        if v < min {
            return Err(self.range("too small"));
        }
        Ok(v)
    }
}

/// Parses `key = value` lines; `#` starts a comment. Missing keys keep
/// their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<&str> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or(ConfigError::Malformed { line })?;
        if key.is_empty() {
            return Err(ConfigError::Malformed { line });
        }
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.into(),
            });
        }
        if seen.contains(&key) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.into(),
            });
        }
        seen.push(key);
        apply(&mut cfg, &Entry { line, key, value })?;
    }
    check(&cfg)?;
    Ok(cfg)
}

fn apply(cfg: &mut RunConfig, e: &Entry) -> Result<(), ConfigError> {
    let s = &mut cfg.system;
    match e.key {
        "omega_297_mhz" => s.omega_297 = mhz(e.non_negative()?),
        "g_mhz" => s.g = mhz(e.non_negative()?),
        "kappa_mhz" => s.kappa = mhz(e.positive()?),
        "gamma_mhz" => s.gamma_total = mhz(e.positive()?),
        "beta" => s.beta = e.open_unit()?,
        "delta_laser_mhz" => s.delta_laser = mhz(e.float()?),
        "delta_cavity_mhz" => s.delta_cavity = mhz(e.float()?),
        "omega_935_mhz" => s.omega_935 = mhz(e.non_negative()?),
        "n_max" => s.n_max = e.count(0)?,
        "cavity_length_um" => cfg.cavity.length = e.positive()? * 1e-6,
        "wavelength_nm" => cfg.cavity.wavelength = e.positive()? * 1e-9,
        "roc_um" => {
            let r = e.positive()? * 1e-6;
            cfg.cavity.roc_1 = r;
            cfg.cavity.roc_2 = r;
        }
        "finesse" => cfg.cavity.finesse = e.positive()?,
        "waist_um" => cfg.waist = e.positive()? * 1e-6,
        "waist_y_um" => cfg.waist_y = e.positive()? * 1e-6,
        "waist_z_um" => cfg.waist_z = e.positive()? * 1e-6,
        "g_peak_mhz" => cfg.g_peak = mhz(e.positive()?),
        "noise_seed" => cfg.noise_seed = e.value.parse().map_err(|_| e.unparsable())?,
        "noise_relative" => cfg.noise_relative = e.non_negative()?,
        "tau_off_us" => cfg.tau_off = e.positive()? * 1e-6,
        "tau_on_us" => cfg.tau_on = e.positive()? * 1e-6,
        "repump_tau_ns" => cfg.repump_tau = e.positive()? * 1e-9,
        "scan_half_width_um" => cfg.scan_half_width = e.positive()? * 1e-6,
        "scan_points" => cfg.scan_points = e.count(5)?,
        "contrast" => cfg.contrast = e.open_unit()?,
        "contrast_definition" => {
            cfg.contrast_definition = match e.value {
                "over_sum" => ContrastDefinition::PeakToPeakOverSum,
                "over_max" => ContrastDefinition::PeakToPeakOverMax,
                _ => return Err(e.unparsable()),
            }
        }
        "wavevector" => {
            cfg.wavevector = match e.value {
                "optical" => WavevectorChoice::Optical,
                "observed_period" => WavevectorChoice::ObservedPeriod,
                _ => return Err(e.unparsable()),
            }
        }
        "eta" => {
            let v = e.float()?;
            if !(0.0..1.0).contains(&v) {
                return Err(e.range("must lie in [0, 1)"));
            }
            cfg.eta = v;
        }
        "stage_range_um" => cfg.stage_range = e.positive()? * 1e-6,
        "stage_points" => cfg.stage_points = e.count(2)?,
        "temperature_mk" => cfg.temperature = e.positive()? * 1e-3,
        "trap_frequency_mhz" => cfg.trap_frequency = mhz(e.positive()?),
        "ion_mass_u" => cfg.ion_mass_u = e.positive()?,
        "data_file" => {
            if e.value.is_empty() {
                return Err(e.unparsable());
            }
            cfg.data_file = Some(PathBuf::from(e.value));
        }
        _ => unreachable!("key list and match arms agree"),
    }
    Ok(())
}

fn check(cfg: &RunConfig) -> Result<(), ConfigError> {
    cfg.system
        .validate()
        .map_err(|e| ConfigError::Inconsistent(e.to_string()))?;
    CavityGeometry::new(
        cfg.cavity.length,
        cfg.cavity.wavelength,
        cfg.cavity.roc_1,
        cfg.cavity.roc_2,
        cfg.cavity.finesse,
    )
    .map_err(|e| ConfigError::Inconsistent(e.to_string()))?;
    Ok(())
}

/// Value `v` in file units with `v * scale == x` exactly, so that parsing
/// the output reproduces `x` bit for bit.
fn inv(x: f64, scale: f64) -> String {
    inv_by(x, x / scale, |v| v * scale)
}

fn inv_mhz(x: f64) -> String {
    inv_by(x, x / MHZ, mhz)
}

/// Shortest-repr `v` near `guess` with `fwd(v) == x`, if one exists.
fn inv_by(x: f64, guess: f64, fwd: impl Fn(f64) -> f64) -> String {
    let (mut up, mut down) = (guess, guess);
    for _ in 0..64 {
        if fwd(up) == x {
            return format!("{up:?}");
        }
        if fwd(down) == x {
            return format!("{down:?}");
        }
        up = up.next_up();
        down = down.next_down();
    }
    format!("{guess:?}")
}

/// Writes every key with round-trip-exact values.
pub fn serialize(cfg: &RunConfig) -> String {
    let s = &cfg.system;
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("omega_297_mhz", inv_mhz(s.omega_297));
    put("g_mhz", inv_mhz(s.g));
    put("kappa_mhz", inv_mhz(s.kappa));
    put("gamma_mhz", inv_mhz(s.gamma_total));
    put("beta", inv(s.beta, 1.0));
    put("delta_laser_mhz", inv_mhz(s.delta_laser));
    put("delta_cavity_mhz", inv_mhz(s.delta_cavity));
    put("omega_935_mhz", inv_mhz(s.omega_935));
    put("n_max", s.n_max.to_string());
    put("cavity_length_um", inv(cfg.cavity.length, 1e-6));
    put("wavelength_nm", inv(cfg.cavity.wavelength, 1e-9));
    put("roc_um", inv(cfg.cavity.roc_1, 1e-6));
    put("finesse", inv(cfg.cavity.finesse, 1.0));
    put("waist_um", inv(cfg.waist, 1e-6));
    put("waist_y_um", inv(cfg.waist_y, 1e-6));
    put("waist_z_um", inv(cfg.waist_z, 1e-6));
    put("g_peak_mhz", inv_mhz(cfg.g_peak));
    put("noise_seed", cfg.noise_seed.to_string());
    put("noise_relative", inv(cfg.noise_relative, 1.0));
    put("tau_off_us", inv(cfg.tau_off, 1e-6));
    put("tau_on_us", inv(cfg.tau_on, 1e-6));
    put("repump_tau_ns", inv(cfg.repump_tau, 1e-9));
    put("scan_half_width_um", inv(cfg.scan_half_width, 1e-6));
    put("scan_points", cfg.scan_points.to_string());
    put("contrast", inv(cfg.contrast, 1.0));
    put(
        "contrast_definition",
        match cfg.contrast_definition {
            ContrastDefinition::PeakToPeakOverSum => "over_sum",
            ContrastDefinition::PeakToPeakOverMax => "over_max",
        }
        .into(),
    );
    put(
        "wavevector",
        match cfg.wavevector {
            WavevectorChoice::Optical => "optical",
            WavevectorChoice::ObservedPeriod => "observed_period",
        }
        .into(),
    );
    put("eta", inv(cfg.eta, 1.0));
    put("stage_range_um", inv(cfg.stage_range, 1e-6));
    put("stage_points", cfg.stage_points.to_string());
    put("temperature_mk", inv(cfg.temperature, 1e-3));
    put("trap_frequency_mhz", inv_mhz(cfg.trap_frequency));
    put("ion_mass_u", inv(cfg.ion_mass_u, 1.0));
    if let Some(p) = &cfg.data_file {
        put("data_file", p.display().to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert!((cfg.system.omega_297 / MHZ - 1.13).abs() < 1e-12);
        assert!((cfg.system.kappa / MHZ - 320.0).abs() < 1e-12);
        assert_eq!(cfg.cavity.finesse, 1000.0);
        assert_eq!(cfg.waist, 7e-6);
    }

    #[test]
    fn comments_and_units() {
        let cfg = parse_config("# header\n g_mhz = 2.5 # inline\n\nwavelength_nm=866\n").unwrap();
        assert!((cfg.system.g - 2.5 * MHZ).abs() < 1e-6);
        assert!((cfg.cavity.wavelength - 866e-9).abs() < 1e-20);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_config("g_mhz = 3\nbeta=1.5\n").unwrap_err();
        assert!(
            matches!(e, ConfigError::OutOfRange { line: 2, .. }),
            "{e:?}"
        );
        let e = parse_config("\n\nfoo = 1").unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey { line: 3, .. }));
        let e = parse_config("kappa_mhz = fast").unwrap_err();
        assert!(matches!(e, ConfigError::Unparsable { line: 1, .. }));
        let e = parse_config("kappa_mhz").unwrap_err();
        assert_eq!(e.line(), Some(1));
        let e = parse_config("g_mhz = 1\ng_mhz = 2").unwrap_err();
        assert!(matches!(e, ConfigError::Duplicate { line: 2, .. }));
    }

    #[test]
    fn cross_field_checks() {
        assert!(matches!(
            parse_config("n_max = 0").unwrap_err(),
            ConfigError::Inconsistent(_)
        ));
        assert!(parse_config("n_max = 0\ng_mhz = 0").is_ok());
    }

    #[test]
    fn serialize_round_trips() {
        let text = "omega_297_mhz = 0.93\ng_mhz = 4.1\nbeta = 0.95\nn_max = 2\nnoise_seed = 99\n\
                    contrast_definition = over_max\nwavevector = observed_period\ndata_file = d.txt\n";
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&serialize(&cfg)).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(
            parse_config(&serialize(&RunConfig::default())).unwrap(),
            RunConfig::default()
        );
    }
}
