use std::path::{Path, PathBuf};

use hitrun_core::Error;
use serde::Deserialize;

/// Optional JSON config. Keys mirror the long flag names (with `_` for
/// `-`); a flag given on the command line wins over the same key here.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub jobs: Option<usize>,
    pub map: Option<String>,
    pub map_file: Option<PathBuf>,
    pub width: Option<f64>,
    pub steps: Option<usize>,
    pub start: Option<Vec<f64>>,
    pub algo: Option<String>,
    pub kino: Option<bool>,
    pub budget: Option<usize>,
    pub timing: Option<bool>,
    pub dt: Option<f64>,
    pub v_max: Option<f64>,
    pub lambda: Option<f64>,
    pub k_max: Option<usize>,
    pub experiment: Option<String>,
    pub widths: Option<Vec<f64>>,
    pub runs: Option<usize>,
    pub suite: Option<String>,
    pub trials: Option<usize>,
    pub gen: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::usage(format!("config {}: {e}", path.display())))
    }
}
