// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use ioncav::constants::{ATOMIC_MASS_UNIT, TWO_PI};
use ioncav::estimation::{extract_coupling, fit_tau_decaying, Dataset, InversionOptions};
use ioncav::ion_cavity::{simulate_lambda_sequence, PulseSequenceSpec, SystemParams};
use ioncav::lindblad::{Level, Trajectory};
use ioncav::optics::{
    cooperativity, free_spectral_range, kappa_from_finesse, mode_volume, solid_angle_fraction,
    waist_from_geometry,
};
use ioncav::spatial::{
    debye_waller, localization_from_contrast, localization_table, max_visible_coupling,
    observed_period, simulate_scan, standing_wave_scan, thermal_localization, transverse_grid,
    visibility_from_contrast, ContrastDefinition, DisplacementCoupling, LocalizationModel,
    ModeFunction, NoiseSpec, WavevectorChoice,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::table::{Cell, ResultTable};

const MHZ: f64 = TWO_PI * 1e6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {message}")]
    Input {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Input { .. } => 2,
            Self::Numerical(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Input { .. } => "input",
            Self::Numerical(_) => "numerical",
        }
    }

    /// Single-line `key=value` record for stderr.
    pub fn machine_line(&self) -> String {
        let line = match self {
            Self::Config(e) => e.line(),
            Self::Input { line, .. } => *line,
            Self::Numerical(_) => None,
        };
        let message = self.to_string().replace('\\', "\\\\").replace('"', "\\\"");
        match line {
            Some(l) => format!(
                "error kind={} code={} line={l} message=\"{message}\"",
                self.kind(),
                self.exit_code()
            ),
            None => format!(
                "error kind={} code={} message=\"{message}\"",
                self.kind(),
                self.exit_code()
            ),
        }
    }
}

fn numerical<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Geometry,
    SimulateLambda,
    ReproduceFig3,
    FitTau,
    InvertG,
    ScanMode,
    StandingWave,
    Localization,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Geometry,
        Command::SimulateLambda,
        Command::ReproduceFig3,
        Command::FitTau,
        Command::InvertG,
        Command::ScanMode,
        Command::StandingWave,
        Command::Localization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Geometry => "geometry",
            Self::SimulateLambda => "simulate-lambda",
            Self::ReproduceFig3 => "reproduce-fig3",
            Self::FitTau => "fit-tau",
            Self::InvertG => "invert-g",
            Self::ScanMode => "scan-mode",
            Self::StandingWave => "standing-wave",
            Self::Localization => "localization",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Column schema shown in `--help`.
    pub fn schema(self) -> &'static str {
        match self {
            Self::Geometry => {
                "One row: fsr[GHz] kappa[MHz] waist[um] mode_volume[um3] cooperativity[1] \
                 solid_angle[1]. kappa is kappa/2pi from the finesse; the cooperativity uses \
                 g_peak_mhz, kappa_mhz and gamma_mhz; mode volume and solid angle use waist_um."
            }
            Self::SimulateLambda => {
                "t[us] p_s[1] p_e[1] p_d[1] n_photon[1] for the 297 nm drive from |S,0>, \
                 read every 2 us up to 100 us."
            }
            Self::ReproduceFig3 => {
                "t[us] p_s_on[1] p_s_off[1] fit_on[1] fit_off[1] tau_on[us] tau_off[us]. \
                 'on' uses g_mhz, 'off' sets g = 0; fit columns evaluate A exp(-t/tau)."
            }
            Self::FitTau => {
                "One row: tau[us] tau_err[us] amplitude[1] amplitude_err[1] reduced_chi2[1] \
                 converged[1] points[1]. Reads data_file (columns t_us, value[, sigma]) or, \
                 without one, fits a seeded noisy simulated trace."
            }
            Self::InvertG => {
                "One row: tau_off[us] tau_on[us] omega_297[MHz] g[MHz] g_over_gamma[1] \
                 tau_off_sim[us] tau_on_sim[us] evaluations[1]. Frequencies are nu = omega/2pi."
            }
            Self::ScanMode => {
                "y[um] z[um] rate[1/us] on a scan_points x scan_points transverse grid at an \
                 antinode; rows ordered by y then z; seeded relative noise."
            }
            Self::StandingWave => {
                "stage[nm] zbar[nm] rate[1/us] rate_noisy[1/us] rate_sharp[1/us] along the \
                 cavity axis, smeared by the sigma implied by contrast under the configured \
                 contrast_definition and wavevector."
            }
            Self::Localization => {
                "definition wavevector k[1/um] sigma[nm] visibility[1] g_visible[MHz] \
                 period[nm]: one row per contrast convention plus a 'thermal' row from \
                 temperature_mk, trap_frequency_mhz and ion_mass_u."
            }
        }
    }
}

pub fn run_command(
    cmd: Command,
    cfg: &RunConfig,
    base_dir: &Path,
) -> Result<ResultTable, CliError> {
    match cmd {
        Command::Geometry => geometry(cfg),
        Command::SimulateLambda => simulate_lambda(cfg),
        Command::ReproduceFig3 => reproduce_fig3(cfg),
        Command::FitTau => fit_tau(cfg, base_dir),
        Command::InvertG => invert_g(cfg),
        Command::ScanMode => scan_mode(cfg),
        Command::StandingWave => standing_wave(cfg),
        Command::Localization => localization(cfg),
    }
}

fn geometry(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let geo = &cfg.cavity;
    let s = &cfg.system;
    let mut t = ResultTable::new(&[
        ("fsr", "GHz"),
        ("kappa", "MHz"),
        ("waist", "um"),
        ("mode_volume", "um3"),
        ("cooperativity", "1"),
        ("solid_angle", "1"),
    ]);
    t.push(vec![
        (free_spectral_range(geo) / 1e9).into(),
        (kappa_from_finesse(geo) / MHZ).into(),
        (waist_from_geometry(geo).map_err(numerical)? * 1e6).into(),
        (mode_volume(cfg.waist, geo.length) * 1e18).into(),
        cooperativity(cfg.g_peak, s.kappa, s.gamma_total)
            .map_err(numerical)?
            .into(),
        solid_angle_fraction(cfg.waist, geo.wavelength)
            .map_err(numerical)?
            .into(),
    ]);
    Ok(t)
}

fn lambda_run(p: &SystemParams) -> Result<Trajectory, CliError> {
    simulate_lambda_sequence(p, &PulseSequenceSpec::lambda_default()).map_err(numerical)
}

fn simulate_lambda(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let traj = lambda_run(&cfg.system)?;
    let mut t = ResultTable::new(&[
        ("t", "us"),
        ("p_s", "1"),
        ("p_e", "1"),
        ("p_d", "1"),
        ("n_photon", "1"),
    ]);
    for (i, &time) in traj.times.iter().enumerate() {
        let [ps, pe, pd] = traj.populations[i];
        t.push(vec![
            (time * 1e6).into(),
            ps.into(),
            pe.into(),
            pd.into(),
            traj.photon_number[i].into(),
        ]);
    }
    Ok(t)
}

fn fit_trace(traj: &Trajectory) -> Result<(f64, f64), CliError> {
    let data = Dataset::new(traj.times.clone(), traj.population(Level::S)).map_err(numerical)?;
    let fit = fit_tau_decaying(&data)
        .and_then(|f| f.require_converged())
        .map_err(numerical)?;
    Ok((fit.value("A"), fit.value("tau")))
}

fn reproduce_fig3(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let on_params = cfg.system;
    let off_params = SystemParams {
        g: 0.0,
        ..cfg.system
    };
    let (on, off) = std::thread::scope(|s| {
        let on = s.spawn(|| lambda_run(&on_params));
        let off = s.spawn(|| lambda_run(&off_params));
        (
            on.join().expect("worker panicked"),
            off.join().expect("worker panicked"),
        )
    });
    let (on, off) = (on?, off?);
    let (a_on, tau_on) = fit_trace(&on)?;
    let (a_off, tau_off) = fit_trace(&off)?;
    let mut t = ResultTable::new(&[
        ("t", "us"),
        ("p_s_on", "1"),
        ("p_s_off", "1"),
        ("fit_on", "1"),
        ("fit_off", "1"),
        ("tau_on", "us"),
        ("tau_off", "us"),
    ]);
    for (i, &time) in on.times.iter().enumerate() {
        t.push(vec![
            (time * 1e6).into(),
            on.populations[i][0].into(),
            off.populations[i][0].into(),
            (a_on * (-time / tau_on).exp()).into(),
            (a_off * (-time / tau_off).exp()).into(),
            (tau_on * 1e6).into(),
            (tau_off * 1e6).into(),
        ]);
    }
    Ok(t)
}

/// Whitespace- or comma-separated `t_us value [sigma]` rows; `#` comments
/// and one leading header line are skipped.
pub fn read_data_file(path: &Path) -> Result<Dataset, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.into(),
        line: None,
        message: e.to_string(),
    })?;
    let bad = |line: usize, message: String| CliError::Input {
        path: path.into(),
        line: Some(line),
        message,
    };
    let (mut x, mut y, mut s) = (Vec::new(), Vec::new(), Vec::new());
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if first => {
                first = false;
                continue;
            }
            Err(_) => return Err(bad(i + 1, format!("cannot parse '{content}'"))),
        };
        first = false;
        match values.len() {
            2 | 3 => {
                x.push(values[0] * 1e-6);
                y.push(values[1]);
                if let Some(sigma) = values.get(2) {
                    s.push(*sigma);
                }
            }
            n => return Err(bad(i + 1, format!("expected 2 or 3 columns, found {n}"))),
        }
    }
    let with_sigma = !s.is_empty();
    if with_sigma && s.len() != x.len() {
        return Err(bad(0, "sigma given on some rows only".into()));
    }
    let data = if with_sigma {
        Dataset::with_sigma(x, y, s)
    } else {
        Dataset::new(x, y)
    };
    data.map_err(|e| CliError::Input {
        path: path.into(),
        line: None,
        message: e.to_string(),
    })
}

fn fit_tau(cfg: &RunConfig, base_dir: &Path) -> Result<ResultTable, CliError> {
    let data = match &cfg.data_file {
        Some(p) => read_data_file(&base_dir.join(p))?,
        None => {
            let traj = lambda_run(&cfg.system)?;
            let clean = traj.population(Level::S);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.noise_seed);
            let normal = Normal::new(0.0, 1.0).expect("unit normal");
            let noisy = clean
                .iter()
                .map(|v| v * (1.0 + cfg.noise_relative * normal.sample(&mut rng)))
                .collect();
            if cfg.noise_relative > 0.0 {
                let sigma = clean.iter().map(|v| cfg.noise_relative * v).collect();
                Dataset::with_sigma(traj.times, noisy, sigma).map_err(numerical)?
            } else {
                Dataset::new(traj.times, noisy).map_err(numerical)?
            }
        }
    };
    let fit = fit_tau_decaying(&data).map_err(numerical)?;
    let mut t = ResultTable::new(&[
        ("tau", "us"),
        ("tau_err", "us"),
        ("amplitude", "1"),
        ("amplitude_err", "1"),
        ("reduced_chi2", "1"),
        ("converged", "1"),
        ("points", "1"),
    ]);
    t.push(vec![
        (fit.value("tau") * 1e6).into(),
        (fit.uncertainty("tau") * 1e6).into(),
        fit.value("A").into(),
        fit.uncertainty("A").into(),
        fit.reduced_chi2().into(),
        fit.converged.into(),
        data.len().into(),
    ]);
    Ok(t)
}

fn invert_g(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let opts = InversionOptions::default();
    let r = extract_coupling(cfg.tau_off, cfg.tau_on, &cfg.system, &opts).map_err(numerical)?;
    let mut t = ResultTable::new(&[
        ("tau_off", "us"),
        ("tau_on", "us"),
        ("omega_297", "MHz"),
        ("g", "MHz"),
        ("g_over_gamma", "1"),
        ("tau_off_sim", "us"),
        ("tau_on_sim", "us"),
        ("evaluations", "1"),
    ]);
    t.push(vec![
        (cfg.tau_off * 1e6).into(),
        (cfg.tau_on * 1e6).into(),
        (r.omega_297.value / MHZ).into(),
        (r.g.value / MHZ).into(),
        r.g_over_gamma(&cfg.system).into(),
        (r.omega_297.tau * 1e6).into(),
        (r.g.tau * 1e6).into(),
        (r.omega_297.evaluations + r.g.evaluations).into(),
    ]);
    Ok(t)
}

fn scan_mode(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let mode =
        ModeFunction::new(cfg.waist_y, cfg.waist_z, cfg.cavity.wavelength).map_err(numerical)?;
    let h = cfg.scan_half_width;
    let n = cfg.scan_points;
    let grid = transverse_grid(0.0, (-h, h), (-h, h), n, n);
    let noise = NoiseSpec {
        relative: cfg.noise_relative,
        seed: cfg.noise_seed,
    };
    let samples =
        simulate_scan(&grid, &mode, 1.0 / cfg.repump_tau, Some(noise)).map_err(numerical)?;
    let mut t = ResultTable::new(&[("y", "um"), ("z", "um"), ("rate", "1/us")]);
    for s in samples {
        t.push(vec![
            (s.position[1] * 1e6).into(),
            (s.position[2] * 1e6).into(),
            (s.rate * 1e-6).into(),
        ]);
    }
    Ok(t)
}

fn smearing_model(cfg: &RunConfig) -> Result<(LocalizationModel, f64), CliError> {
    let lambda = cfg.cavity.wavelength;
    let d = DisplacementCoupling::new(cfg.eta).map_err(numerical)?;
    let period = observed_period(lambda, d).map_err(numerical)?;
    let k = cfg.wavevector.wavevector(lambda, period);
    let sigma =
        localization_from_contrast(cfg.contrast, cfg.contrast_definition, k).map_err(numerical)?;
    Ok((
        LocalizationModel {
            contrast_definition: cfg.contrast_definition,
            wavevector_choice: cfg.wavevector,
            sigma,
        },
        period,
    ))
}

fn standing_wave(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let (model, _) = smearing_model(cfg)?;
    let d = DisplacementCoupling::new(cfg.eta).map_err(numerical)?;
    let k = TWO_PI / cfg.cavity.wavelength;
    let n = cfg.stage_points;
    let stage: Vec<f64> = (0..n)
        .map(|i| cfg.stage_range * i as f64 / (n - 1) as f64)
        .collect();
    let peak = 1.0 / cfg.repump_tau;
    let smeared = standing_wave_scan(&stage, &model, k, d, peak);
    let sharp = standing_wave_scan(
        &stage,
        &LocalizationModel {
            sigma: 0.0,
            ..model
        },
        k,
        d,
        peak,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.noise_seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut t = ResultTable::new(&[
        ("stage", "nm"),
        ("zbar", "nm"),
        ("rate", "1/us"),
        ("rate_noisy", "1/us"),
        ("rate_sharp", "1/us"),
    ]);
    for i in 0..n {
        let noisy = smeared[i] * (1.0 + cfg.noise_relative * normal.sample(&mut rng));
        t.push(vec![
            (stage[i] * 1e9).into(),
            ((1.0 - cfg.eta) * stage[i] * 1e9).into(),
            (smeared[i] * 1e-6).into(),
            (noisy * 1e-6).into(),
            (sharp[i] * 1e-6).into(),
        ]);
    }
    Ok(t)
}

fn localization(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let lambda = cfg.cavity.wavelength;
    let (_, period) = smearing_model(cfg)?;
    let rows = localization_table(cfg.contrast, lambda, period).map_err(numerical)?;
    let mut t = ResultTable::new(&[
        ("definition", ""),
        ("wavevector", ""),
        ("k", "1/um"),
        ("sigma", "nm"),
        ("visibility", "1"),
        ("g_visible", "MHz"),
        ("period", "nm"),
    ]);
    for r in rows {
        let v = visibility_from_contrast(cfg.contrast, r.definition);
        t.push(vec![
            match r.definition {
                ContrastDefinition::PeakToPeakOverSum => "over_sum",
                ContrastDefinition::PeakToPeakOverMax => "over_max",
            }
            .into(),
            match r.wavevector {
                WavevectorChoice::Optical => "optical",
                WavevectorChoice::ObservedPeriod => "observed_period",
            }
            .into(),
            (r.k * 1e-6).into(),
            (r.sigma * 1e9).into(),
            v.into(),
            (max_visible_coupling(cfg.g_peak, v).map_err(numerical)? / MHZ).into(),
            (period * 1e9).into(),
        ]);
    }
    let k = TWO_PI / lambda;
    let sigma = thermal_localization(
        cfg.temperature,
        cfg.ion_mass_u * ATOMIC_MASS_UNIT,
        cfg.trap_frequency,
    )
    .map_err(numerical)?;
    let v = debye_waller(k, sigma);
    t.push(vec![
        "thermal".into(),
        "optical".into(),
        (k * 1e-6).into(),
        (sigma * 1e9).into(),
        v.into(),
        (max_visible_coupling(cfg.g_peak, v).map_err(numerical)? / MHZ).into(),
        Cell::Num(period * 1e9),
    ]);
    Ok(t)
}
