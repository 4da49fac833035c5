//! Configs shipped inside the binary.

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};

pub const BUNDLED: [(&str, &str); 5] = [
    ("s2_unstable_sweep", include_str!("../configs/s2_unstable_sweep.toml")),
    ("s1_flat", include_str!("../configs/s1_flat.toml")),
    ("s2_uniqueness", include_str!("../configs/s2_uniqueness.toml")),
    ("s3_extension_stability", include_str!("../configs/s3_extension_stability.toml")),
    ("punctured_s2_exhaustion", include_str!("../configs/punctured_s2_exhaustion.toml")),
];

pub fn bundled_text(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn bundled(name: &str) -> Result<ScenarioConfig> {
    ScenarioConfig::parse(bundled_text(name).ok_or_else(|| CliError::UnknownBundled(name.to_string()))?)
}
