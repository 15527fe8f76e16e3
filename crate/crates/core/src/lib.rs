//! Center-surround receptive-field kernels for depthwise convolutions.
//!
//! * [`dog`]: difference-of-Gaussians evaluation and balanced kernel synthesis
//! * [`bank`]: seeded initialization banks with replayable manifests
//! * [`analytics`]: min-max encoding, k-means and template labeling of
//!   trained kernels
//! * [`io`]: NPY, JSON, CSV, PNG/PGM and SVG formats
//! * [`selfcheck`]: property suites with pass/fail reporting
//! * [`synthetic`]: labeled synthetic kernel sets for recovery tests

pub mod analytics;
pub mod bank;
pub mod dog;
pub mod error;
pub mod io;
pub mod oracle;
pub mod rng;
pub mod selfcheck;
pub mod synthetic;

pub use analytics::{
    analyze, kmeans, label_clusters, min_max_encode, proportion_table, ClusterLabel, ClusterReport,
    KMeansConfig, KernelSet, ProportionRow,
};
pub use bank::{bank_for_layers, sample_bank, BankManifest, KernelBank, LayerSpec, PolarityMode, SamplerConfig};
pub use dog::{
    dog_continuous, dog_rodieck, generate_kernel, sigma_from_gamma, DoGSpec, Kernel, Polarity, RodieckParams,
};
pub use error::{Error, Result};
pub use io::{ArrayData, ArrayFile, Dtype, RenderSpec};
