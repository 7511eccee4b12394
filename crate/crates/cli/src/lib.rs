//! Batch front end for `majfix-core`: problem configs in TOML, JSON reports
//! and CSV plot data.

pub mod build;
pub mod commands;
pub mod config;
pub mod demo;
pub mod error;
pub mod presets;
pub mod report;

use std::path::Path;

pub use build::{build, Problem};
pub use commands::{
    parse_zones, run_analyze, run_compare, run_solve, run_zones, Overrides, SolveOutcome, ZonesData,
};
pub use config::ProblemConfig;
pub use error::CliError;

/// Builds the problem from a config file or a preset; exactly one is needed.
pub fn load_problem(config: Option<&Path>, preset: Option<&str>) -> Result<Problem, CliError> {
    match (config, preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(Path::new("."));
            build(&ProblemConfig::from_toml(&text)?, base)
        }
        (None, Some(name)) => presets::load_preset(name),
        _ => Err(CliError::Config("give exactly one of --config and --preset".into())),
    }
}
