//! JSON form of [`BankManifest`], schema version 1.
//!
//! Keys are emitted in sorted order. The seed is a decimal string so the full
//! 64-bit range survives readers that parse numbers as doubles.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bank::{BankManifest, PolarityMode, SamplerConfig, MANIFEST_SCHEMA_VERSION};
use crate::dog::Polarity;
use crate::error::{Error, Result};

const REQUIRED_KEYS: [&str; 9] = [
    "gamma_max",
    "gamma_min",
    "gammas",
    "kernel_size",
    "layer_name",
    "polarities",
    "polarity_mode",
    "schema_version",
    "seed",
];

// fields in sorted order; serialization follows declaration order
#[derive(Serialize, Deserialize)]
struct ManifestJson {
    gamma_max: f64,
    gamma_min: f64,
    gammas: Vec<f64>,
    kernel_size: usize,
    layer_name: Option<String>,
    polarities: Vec<Polarity>,
    polarity_mode: PolarityMode,
    schema_version: u32,
    seed: String,
}

pub fn manifest_to_json(manifest: &BankManifest) -> Result<String> {
    let json = ManifestJson {
        gamma_max: manifest.config.gamma_max,
        gamma_min: manifest.config.gamma_min,
        gammas: manifest.gammas.clone(),
        kernel_size: manifest.config.kernel_size,
        layer_name: manifest.layer_name.clone(),
        polarities: manifest.polarities.clone(),
        polarity_mode: manifest.config.polarity_mode,
        schema_version: manifest.schema_version,
        seed: manifest.seed.to_string(),
    };
    let mut text = serde_json::to_string_pretty(&json).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn manifest_from_json(text: &str) -> Result<BankManifest> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let Some(object) = value.as_object() else {
        return Err(Error::SchemaMismatch("manifest must be a JSON object".into()));
    };
    if let Some(missing) = REQUIRED_KEYS.iter().find(|k| !object.contains_key(**k)) {
        return Err(Error::SchemaMismatch(format!("missing key {missing:?}")));
    }
    match object["schema_version"].as_u64() {
        Some(v) if v == u64::from(MANIFEST_SCHEMA_VERSION) => {}
        _ => {
            return Err(Error::SchemaMismatch(format!(
                "unsupported schema_version {}",
                object["schema_version"]
            )))
        }
    }
    let json: ManifestJson = serde_json::from_value(value).map_err(|e| Error::SchemaMismatch(e.to_string()))?;
    let seed = json
        .seed
        .parse::<u64>()
        .map_err(|_| Error::SchemaMismatch(format!("seed {:?} is not a decimal u64", json.seed)))?;
    if json.gammas.len() != json.polarities.len() {
        return Err(Error::SchemaMismatch(format!(
            "{} gammas but {} polarities",
            json.gammas.len(),
            json.polarities.len()
        )));
    }
    let config = SamplerConfig {
        seed,
        gamma_min: json.gamma_min,
        gamma_max: json.gamma_max,
        polarity_mode: json.polarity_mode,
        kernel_size: json.kernel_size,
    };
    Ok(BankManifest {
        schema_version: json.schema_version,
        seed,
        config,
        gammas: json.gammas,
        polarities: json.polarities,
        layer_name: json.layer_name,
    })
}

pub fn write_manifest(path: impl AsRef<Path>, manifest: &BankManifest) -> Result<()> {
    super::write_atomic(path.as_ref(), manifest_to_json(manifest)?.as_bytes())
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<BankManifest> {
    manifest_from_json(&std::fs::read_to_string(path)?)
}
