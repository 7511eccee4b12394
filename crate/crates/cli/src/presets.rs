//! Named problem configs shipped with the binary.

use std::path::Path;

use crate::build::{build, Problem};
use crate::config::ProblemConfig;
use crate::error::CliError;

pub const PRESETS: &[(&str, &str)] = &[
    ("quadratic", include_str!("../presets/quadratic.toml")),
    ("tangency", include_str!("../presets/tangency.toml")),
    ("banach", include_str!("../presets/banach.toml")),
    ("zero_offset", include_str!("../presets/zero_offset.toml")),
    ("lr_quadratic", include_str!("../presets/lr_quadratic.toml")),
    ("lr_cubic", include_str!("../presets/lr_cubic.toml")),
    ("lr_no_existence", include_str!("../presets/lr_no_existence.toml")),
    ("lr_vector", include_str!("../presets/lr_vector.toml")),
    ("halved", include_str!("../presets/halved.toml")),
    ("hammerstein_c", include_str!("../presets/hammerstein_c.toml")),
    ("hammerstein_lp", include_str!("../presets/hammerstein_lp.toml")),
    ("urysohn", include_str!("../presets/urysohn.toml")),
    ("composition", include_str!("../presets/composition.toml")),
];

pub fn preset_text(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Config(format!("unknown preset {name:?}; known: {}", names.join(", ")))
        })
}

pub fn load_preset(name: &str) -> Result<Problem, CliError> {
    build(&ProblemConfig::from_toml(preset_text(name)?)?, Path::new("."))
}
