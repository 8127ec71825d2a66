use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use maclip::ScoreConfig;
use serde::{Deserialize, Serialize};

/// Provenance record written next to every output file as `<out>.manifest.json`.
///
/// Kept in a sidecar rather than inside the output so the output itself stays
/// byte-identical across runs (the duration would otherwise differ).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: Option<ScoreConfig>,
    pub inputs: BTreeMap<String, PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub duration_ms: u128,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config: Option<ScoreConfig>,
        inputs: &[(&'static str, PathBuf)],
        output: &Path,
        duration: Duration,
    ) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            outputs: vec![output.to_path_buf()],
            duration_ms: duration.as_millis(),
        }
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
