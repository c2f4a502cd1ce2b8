//! Run manifests: every output file is accompanied by a
//! `<file>.manifest.json` recording enough to regenerate it exactly.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::mm::write_atomic;
use crate::CliError;

#[derive(Serialize)]
pub struct RunManifest {
    /// The argv the tool was invoked with.
    pub command_line: Vec<String>,
    /// Fully resolved configuration after defaults were applied.
    pub config: serde_json::Value,
    /// RNG seed, when the command involves one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub timestamp_unix_secs: u64,
    /// Paths written by this invocation.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config: serde_json::Value, seed: Option<u64>, outputs: &[&Path]) -> Self {
        Self {
            command_line: std::env::args().collect(),
            config,
            seed,
            timestamp_unix_secs: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs: outputs
                .iter()
                .map(|p| p.to_string_lossy().into_owned())
                .collect(),
        }
    }

    /// Writes the manifest next to `primary_output`.
    pub fn write_alongside(&self, primary_output: &Path) -> Result<(), CliError> {
        let mut name = primary_output
            .file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        name.push_str(".manifest.json");
        let path = primary_output.with_file_name(name);
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Usage(format!("manifest serialization failed: {e}")))?;
        write_atomic(&path, &(text + "\n"))
    }
}
