//! Optional TOML configuration. Each subcommand reads its own table, with
//! keys named like the long flags (`gamma-min`, `cell`, ...). Flags win over
//! the file, the file wins over `RETINA_SEED`, which wins over built-in
//! defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "RETINA_SEED";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub generate: GenerateFile,
    #[serde(default)]
    pub analyze: AnalyzeFile,
    #[serde(default)]
    pub render: RenderFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GenerateFile {
    pub size: Option<usize>,
    pub channels: Option<usize>,
    pub seed: Option<u64>,
    pub gamma_min: Option<f64>,
    pub gamma_max: Option<f64>,
    pub polarity: Option<String>,
    pub dtype: Option<String>,
    pub out: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub layers: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct AnalyzeFile {
    #[serde(rename = "in")]
    pub inputs: Option<Vec<PathBuf>>,
    pub k: Option<usize>,
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub per_layer: Option<bool>,
    pub tag: Option<String>,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RenderFile {
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub grid: Option<PathBuf>,
    pub columns: Option<usize>,
    pub cell: Option<usize>,
    pub colormap: Option<String>,
    pub normalize: Option<String>,
    pub proportions: Option<PathBuf>,
    pub hist: Option<PathBuf>,
}

pub fn load(path: Option<&Path>) -> CliResult<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
}

/// Flag, then config file, then `RETINA_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> CliResult<u64> {
    if let Some(seed) = flag.or(file) {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("{SEED_ENV}={text:?} is not a u64"))),
        Err(_) => Ok(0),
    }
}
