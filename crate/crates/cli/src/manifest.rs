use std::path::{Path, PathBuf};

use serde::Serialize;

/// Record of one run, written next to its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub resolved: serde_json::Value,
    pub outputs: Vec<String>,
    pub version: String,
    pub wall_time_s: f64,
}

impl RunManifest {
    /// `<stem>.manifest.json` beside `out`.
    pub fn path_for(out: &Path) -> PathBuf {
        let stem = out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into());
        out.with_file_name(format!("{stem}.manifest.json"))
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n")
    }
}
