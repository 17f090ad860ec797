// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: configuration parsing, subcommands and table
//! output.

pub mod commands;
pub mod config;
pub mod table;

use std::path::Path;

pub use commands::{read_data_file, run_command, CliError, Command};
pub use config::{parse_config, serialize, ConfigError, RunConfig};
pub use table::{Cell, ResultTable};

/// Loads the config (defaults when `config` is `None`), applies the seed
/// override, runs `cmd` and writes the table to `out`.
pub fn run(
    cmd: Command,
    config: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let (mut cfg, base_dir) = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input {
                path: path.into(),
                line: None,
                message: e.to_string(),
            })?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (parse_config(&text)?, base)
        }
        None => (RunConfig::default(), Default::default()),
    };
    if let Some(s) = seed {
        cfg.noise_seed = s;
    }
    let table = run_command(cmd, &cfg, &base_dir)?;
    std::fs::write(out, table.render()).map_err(|e| CliError::Input {
        path: out.into(),
        line: None,
        message: e.to_string(),
    })
}
