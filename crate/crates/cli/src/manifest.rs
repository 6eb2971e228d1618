//! The run manifest written alongside surveys: the full configuration plus
//! bookkeeping needed to reproduce the CSV bit-for-bit (the wall clock is
//! informational only).

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

#[derive(Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self { name: "depdist", version: env!("CARGO_PKG_VERSION") }
    }
}

#[derive(Serialize)]
pub struct GenConfigOut {
    pub n_min: usize,
    pub n_max: usize,
    pub n_star: usize,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub tool: ToolInfo,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<GenConfigOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub files: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub punct_tags: Option<Vec<String>>,
    pub threads: usize,
    pub keep_undersampled: bool,
    pub format: String,
    /// Structures examined per length (exhaustive totals or draw counts;
    /// surviving sentence counts for treebank runs).
    pub per_length_structures: BTreeMap<usize, u64>,
    pub wall_clock_seconds: f64,
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, manifest)?;
    use std::io::Write;
    writeln!(file)
}
