//! Reproducible initialization banks of center-surround kernels.
//!
//! For each kernel the sampler draws a polarity and then a center ratio `γ`
//! from one [`Stream`]. The coin is consumed in every polarity mode, so the
//! `γ` sequence for a given seed does not depend on the mode.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dog::{generate_kernel, DoGSpec, Kernel, Polarity};
use crate::error::{Error, Result};
use crate::rng::Stream;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarityMode {
    /// Each polarity with probability 1/2.
    Both,
    #[serde(rename = "on")]
    OnOnly,
    #[serde(rename = "off")]
    OffOnly,
}

impl PolarityMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PolarityMode::Both => "both",
            PolarityMode::OnOnly => "on",
            PolarityMode::OffOnly => "off",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(PolarityMode::Both),
            "on" => Ok(PolarityMode::OnOnly),
            "off" => Ok(PolarityMode::OffOnly),
            other => Err(Error::InvalidConfig(format!(
                "polarity mode must be both, on or off, got {other:?}"
            ))),
        }
    }

    fn pick(self, heads: bool) -> Polarity {
        match self {
            PolarityMode::Both if heads => Polarity::OnCenter,
            PolarityMode::Both => Polarity::OffCenter,
            PolarityMode::OnOnly => Polarity::OnCenter,
            PolarityMode::OffOnly => Polarity::OffCenter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub polarity_mode: PolarityMode,
    pub kernel_size: usize,
}

impl SamplerConfig {
    pub fn new(seed: u64, kernel_size: usize) -> Self {
        Self {
            seed,
            gamma_min: 0.05,
            gamma_max: 0.5,
            polarity_mode: PolarityMode::Both,
            kernel_size,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.gamma_min, self.gamma_max);
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < gamma_min < gamma_max < 1, got [{lo}, {hi}]"
            )));
        }
        if self.kernel_size < 3 || self.kernel_size.is_multiple_of(2) {
            return Err(Error::InvalidSize(self.kernel_size));
        }
        Ok(())
    }
}

/// Every draw behind a bank, sufficient to rebuild it without the generator.
#[derive(Debug, Clone, PartialEq)]
pub struct BankManifest {
    pub schema_version: u32,
    pub seed: u64,
    pub config: SamplerConfig,
    pub gammas: Vec<f64>,
    pub polarities: Vec<Polarity>,
    pub layer_name: Option<String>,
}

impl BankManifest {
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn specs(&self) -> Result<Vec<DoGSpec>> {
        if self.gammas.len() != self.polarities.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} gammas but {} polarities",
                self.gammas.len(),
                self.polarities.len()
            )));
        }
        self.gammas
            .iter()
            .zip(&self.polarities)
            .map(|(&g, &p)| DoGSpec::new(self.config.kernel_size, g, p))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelBank {
    pub kernels: Vec<Kernel>,
    pub manifest: BankManifest,
}

impl KernelBank {
    /// Rebuilds the kernels recorded in `manifest`.
    pub fn from_manifest(manifest: BankManifest) -> Result<Self> {
        let specs = manifest.specs()?;
        let kernels = specs
            .par_iter()
            .map(generate_kernel)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kernels, manifest })
    }

    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernels.is_empty()
    }

    pub fn kernel_size(&self) -> usize {
        self.manifest.config.kernel_size
    }
}

fn draw(config: &SamplerConfig, stream: &mut Stream, n: usize) -> (Vec<f64>, Vec<Polarity>) {
    let mut gammas = Vec::with_capacity(n);
    let mut polarities = Vec::with_capacity(n);
    for _ in 0..n {
        polarities.push(config.polarity_mode.pick(stream.coin()));
        gammas.push(stream.uniform(config.gamma_min, config.gamma_max));
    }
    (gammas, polarities)
}

fn build(
    config: &SamplerConfig,
    mut stream: Stream,
    n: usize,
    layer_name: Option<String>,
) -> Result<KernelBank> {
    config.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig("bank needs at least one kernel".into()));
    }
    let (gammas, polarities) = draw(config, &mut stream, n);
    KernelBank::from_manifest(BankManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        seed: config.seed,
        config: *config,
        gammas,
        polarities,
        layer_name,
    })
}

/// Draws `n` kernels from substream 0 of `config.seed`.
pub fn sample_bank(config: &SamplerConfig, n: usize) -> Result<KernelBank> {
    build(config, Stream::new(config.seed), n, None)
}

/// One depthwise layer to initialize.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub name: String,
    pub channels: usize,
    pub kernel_size: usize,
}

impl LayerSpec {
    pub fn new(name: impl Into<String>, channels: usize, kernel_size: usize) -> Self {
        Self {
            name: name.into(),
            channels,
            kernel_size,
        }
    }
}

/// One bank per layer; layer `i` draws from substream `i` of the seed and
/// uses its own kernel size in place of `config.kernel_size`.
pub fn bank_for_layers(config: &SamplerConfig, layers: &[LayerSpec]) -> Result<Vec<KernelBank>> {
    if layers.is_empty() {
        return Err(Error::InvalidConfig("layer list is empty".into()));
    }
    let mut seen = HashSet::new();
    for layer in layers {
        if !seen.insert(layer.name.as_str()) {
            return Err(Error::DuplicateLayerName(layer.name.clone()));
        }
        if layer.channels == 0 {
            return Err(Error::InvalidConfig(format!("layer {:?} has no channels", layer.name)));
        }
    }
    layers
        .iter()
        .enumerate()
        .map(|(i, layer)| {
            let layer_config = SamplerConfig {
                kernel_size: layer.kernel_size,
                ..*config
            };
            build(
                &layer_config,
                Stream::substream(config.seed, i as u64),
                layer.channels,
                Some(layer.name.clone()),
            )
        })
        .collect()
}
