//! Labeled synthetic kernel sets with known ground truth.

use crate::analytics::ClusterLabel;
use crate::dog::{generate_kernel, DoGSpec, Kernel, Polarity};
use crate::error::Result;
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub size: usize,
    pub per_class: usize,
    /// Gaussian noise std as a fraction of each kernel's weight range.
    pub noise: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn new(size: usize, per_class: usize, noise: f64, seed: u64) -> Self {
        Self {
            size,
            per_class,
            noise,
            gamma_min: 0.05,
            gamma_max: 0.5,
            seed,
        }
    }
}

/// `per_class` noisy on-center kernels, then as many noisy off-center
/// kernels, then as many kernels of i.i.d. Uniform[-1, 1] weights.
pub fn labeled_bank(config: &SyntheticConfig) -> Result<(Vec<Kernel>, Vec<ClusterLabel>)> {
    let mut stream = Stream::new(config.seed);
    let n = config.size * config.size;
    let mut kernels = Vec::with_capacity(3 * config.per_class);
    let mut truth = Vec::with_capacity(3 * config.per_class);
    for (label, polarity) in [
        (ClusterLabel::OnCenter, Some(Polarity::OnCenter)),
        (ClusterLabel::OffCenter, Some(Polarity::OffCenter)),
        (ClusterLabel::Other, None),
    ] {
        for _ in 0..config.per_class {
            let weights = match polarity {
                Some(p) => {
                    let gamma = stream.uniform(config.gamma_min, config.gamma_max);
                    let clean = generate_kernel(&DoGSpec::new(config.size, gamma, p)?)?;
                    let (lo, hi) = clean
                        .weights()
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
                    let scale = config.noise * (hi - lo);
                    clean.weights().iter().map(|v| v + scale * stream.normal()).collect()
                }
                None => (0..n).map(|_| stream.uniform(-1.0, 1.0)).collect(),
            };
            kernels.push(Kernel::new(config.size, weights)?);
            truth.push(label);
        }
    }
    Ok((kernels, truth))
}

/// Fraction of kernels whose cluster label matches the ground truth.
pub fn label_agreement(assignments: &[usize], labels: &[ClusterLabel], truth: &[ClusterLabel]) -> f64 {
    let hits = assignments
        .iter()
        .zip(truth)
        .filter(|(a, t)| labels[**a] == **t)
        .count();
    hits as f64 / truth.len() as f64
}
