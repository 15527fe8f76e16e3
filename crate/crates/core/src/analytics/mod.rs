//! Clustering of depthwise kernels into on-center, off-center and other
//! patterns.
//!
//! Each kernel is min-max encoded, flattened row-major, clustered with
//! k-means and the resulting centroids are named by template correlation.

pub mod encode;
pub mod kmeans;
pub mod label;

use serde::{Deserialize, Serialize};

use crate::dog::Kernel;
use crate::error::{Error, Result};

pub use encode::min_max_encode;
pub use kmeans::{kmeans, KMeansConfig, KMeansResult};
pub use label::{label_clusters, pearson, ClusterLabel, Labeling};

/// Kernels of one shared odd size, tagged with where they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSet {
    kernels: Vec<Kernel>,
    source: String,
}

impl KernelSet {
    pub fn new(kernels: Vec<Kernel>, source: impl Into<String>) -> Result<Self> {
        let Some(first) = kernels.first() else {
            return Err(Error::InvalidInput("kernel set is empty".into()));
        };
        let size = first.size();
        if size % 2 == 0 {
            return Err(Error::InvalidSize(size));
        }
        if kernels.iter().any(|k| k.size() != size) {
            return Err(Error::InvalidInput("kernels in a set must share one size".into()));
        }
        Ok(Self {
            kernels,
            source: source.into(),
        })
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn kernel_size(&self) -> usize {
        self.kernels[0].size()
    }

    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub source: String,
    pub kernel_size: usize,
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Mean of each cluster's encoded members, row-major.
    pub cluster_averages: Vec<Vec<f64>>,
    pub labels: Vec<ClusterLabel>,
    pub label_scores: Vec<f64>,
    pub label_confident: Vec<bool>,
    pub counts: Vec<usize>,
    pub proportions: Vec<f64>,
    pub inertia: f64,
}

impl ClusterReport {
    pub fn cluster_average_kernels(&self) -> Result<Vec<Kernel>> {
        self.cluster_averages
            .iter()
            .map(|w| Kernel::new(self.kernel_size, w.clone()))
            .collect()
    }

    /// Share of kernels in clusters carrying `label`.
    pub fn proportion_of(&self, label: ClusterLabel) -> f64 {
        self.labels
            .iter()
            .zip(&self.proportions)
            .filter(|(l, _)| **l == label)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Full pipeline: encode, flatten, cluster, label, summarize.
pub fn analyze(set: &KernelSet, config: &KMeansConfig) -> Result<ClusterReport> {
    let points: Vec<Vec<f64>> = set
        .kernels()
        .iter()
        .map(|k| min_max_encode(k).into_weights())
        .collect();
    // cluster in a canonical point order so the outcome does not depend on
    // the order kernels were supplied in
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let canonical: Vec<Vec<f64>> = order.iter().map(|&i| points[i].clone()).collect();
    let mut result = kmeans(&canonical, config)?;
    let mut assignments = vec![0; points.len()];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = result.assignments[pos];
    }
    result.assignments = assignments;
    let labeling = label_clusters(&result.centroids, set.kernel_size())?;

    let k = config.k;
    let dim = set.kernel_size() * set.kernel_size();
    let mut counts = vec![0usize; k];
    let mut sums = vec![vec![0.0; dim]; k];
    for (p, &a) in points.iter().zip(&result.assignments) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(p) {
            *s += v;
        }
    }
    let total = points.len() as f64;
    let proportions = counts.iter().map(|&c| c as f64 / total).collect();
    let cluster_averages = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| s.into_iter().map(|v| if c > 0 { v / c as f64 } else { 0.0 }).collect())
        .collect();

    Ok(ClusterReport {
        source: set.source().to_string(),
        kernel_size: set.kernel_size(),
        assignments: result.assignments,
        centroids: result.centroids,
        cluster_averages,
        labels: labeling.labels,
        label_scores: labeling.scores,
        label_confident: labeling.confident,
        counts,
        proportions,
        inertia: result.inertia,
    })
}

/// One row of the cross-model proportion table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionRow {
    pub model_tag: String,
    pub on: f64,
    pub off: f64,
    pub other: f64,
}

pub fn proportion_table(reports: &[(String, ClusterReport)]) -> Vec<ProportionRow> {
    reports
        .iter()
        .map(|(tag, r)| ProportionRow {
            model_tag: tag.clone(),
            on: r.proportion_of(ClusterLabel::OnCenter),
            off: r.proportion_of(ClusterLabel::OffCenter),
            other: r.proportion_of(ClusterLabel::Other),
        })
        .collect()
}
