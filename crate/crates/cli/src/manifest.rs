use crate::artifacts::FileEntry;
use crate::error::{io, CliError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const MANIFEST: &str = "manifest.json";
pub const FORMAT_VERSION: u32 = 1;

/// One flow run whose monitor series was written to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub label: String,
    pub monitors: String,
    pub epsilon: f64,
    pub dt: f64,
    pub det_renorm: bool,
    /// `perturbed` or `naive`.
    pub kind: String,
    pub converged: bool,
    /// A non-converged mandatory run makes the whole run fail.
    pub mandatory: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// `h = K⁻¹H`, one field per stage or flow.
    Metric,
    /// `√−1ΛF_K` of the model.
    Curvature,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub path: String,
    pub kind: FieldKind,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub tool_version: String,
    pub pipeline: String,
    pub scenario: String,
    pub seed: u64,
    /// SHA-256 of the normalized config text stored in `config.toml`.
    pub config_sha256: String,
    pub verdicts: BTreeMap<String, String>,
    pub runs: Vec<RunRecord>,
    pub fields: Vec<FieldRecord>,
    pub all_converged: bool,
    /// Every other file of the directory, with its hash.
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(io(&path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Manifest(format!("{}: {e}", path.display())))
    }
}
