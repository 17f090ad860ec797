// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ioncav_cli::{run, Command};

#[derive(Parser)]
#[command(
    name = "ioncav",
    version,
    about = "Ion-cavity master-equation simulations and fits"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Common {
    /// key = value configuration file; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output table (tab-separated, one header row with units).
    #[arg(long)]
    out: PathBuf,
    /// Overrides noise_seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Sub {
    /// Cavity figures of merit.
    #[command(after_long_help = Command::Geometry.schema())]
    Geometry(Common),
    /// Populations during the 297 nm drive.
    #[command(after_long_help = Command::SimulateLambda.schema())]
    SimulateLambda(Common),
    /// Resonant and off-resonant transfer curves with fitted time constants.
    #[command(name = "reproduce-fig3", after_long_help = Command::ReproduceFig3.schema())]
    ReproduceFig3(Common),
    /// Exponential fit of a decay trace.
    #[command(after_long_help = Command::FitTau.schema())]
    FitTau(Common),
    /// Drive strength and cavity coupling from the two time constants.
    #[command(after_long_help = Command::InvertG.schema())]
    InvertG(Common),
    /// Transverse repump-rate map.
    #[command(after_long_help = Command::ScanMode.schema())]
    ScanMode(Common),
    /// Axial scan through the smeared standing wave.
    #[command(after_long_help = Command::StandingWave.schema())]
    StandingWave(Common),
    /// Localization under each contrast convention.
    #[command(after_long_help = Command::Localization.schema())]
    Localization(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Sub::Geometry(c) => (Command::Geometry, c),
        Sub::SimulateLambda(c) => (Command::SimulateLambda, c),
        Sub::ReproduceFig3(c) => (Command::ReproduceFig3, c),
        Sub::FitTau(c) => (Command::FitTau, c),
        Sub::InvertG(c) => (Command::InvertG, c),
        Sub::ScanMode(c) => (Command::ScanMode, c),
        Sub::StandingWave(c) => (Command::StandingWave, c),
        Sub::Localization(c) => (Command::Localization, c),
    };
    match run(cmd, common.config.as_deref(), &common.out, common.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
