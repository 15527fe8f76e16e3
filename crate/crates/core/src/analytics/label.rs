//! Naming k-means clusters by correlation with canonical DoG templates.

use serde::{Deserialize, Serialize};

use crate::analytics::encode::min_max_encode;
use crate::dog::{generate_kernel, DoGSpec, Polarity};
use crate::error::{Error, Result};

/// Center ratio of the canonical templates.
pub const TEMPLATE_GAMMA: f64 = 0.4;
/// Minimum template correlation for a confident on/off label.
pub const CORRELATION_FLOOR: f64 = 0.5;
const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterLabel {
    #[serde(rename = "on")]
    OnCenter,
    #[serde(rename = "off")]
    OffCenter,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Labeling {
    pub labels: Vec<ClusterLabel>,
    /// Correlation with the assigned template; for `Other`, the larger
    /// correlation with either template.
    pub scores: Vec<f64>,
    /// Whether each label agrees with the correlation floor: on/off clusters
    /// reach it with their template, other clusters reach it with neither.
    pub confident: Vec<bool>,
}

/// Pearson correlation; zero when either side has no variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    if va <= 0.0 || vb <= 0.0 {
        return 0.0;
    }
    (cov / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0)
}

/// Min-max encoded on- and off-center templates, flattened row-major.
pub fn templates(size: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let on = DoGSpec::new(size, TEMPLATE_GAMMA, Polarity::OnCenter)?;
    let on_t = min_max_encode(&generate_kernel(&on)?).into_weights();
    let off_t = min_max_encode(&generate_kernel(&on.with_polarity(Polarity::OffCenter))?).into_weights();
    Ok((on_t, off_t))
}

fn argmax_unique(candidates: &[usize], score: impl Fn(usize) -> f64) -> Result<usize> {
    let best = candidates
        .iter()
        .copied()
        .max_by(|&a, &b| score(a).total_cmp(&score(b)).then(b.cmp(&a)))
        .expect("non-empty candidates");
    if let Some(&rival) = candidates
        .iter()
        .find(|&&c| c != best && (score(c) - score(best)).abs() <= TIE_EPS)
    {
        return Err(Error::AmbiguousLabeling(best.min(rival), best.max(rival)));
    }
    Ok(best)
}

/// One-to-one labeling: the centroid most correlated with the on template is
/// `OnCenter`, the remaining one most correlated with the off template is
/// `OffCenter`, and every other centroid is `Other`.
pub fn label_clusters(centroids: &[Vec<f64>], size: usize) -> Result<Labeling> {
    if centroids.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "labeling needs at least two clusters, got {}",
            centroids.len()
        )));
    }
    if let Some(c) = centroids.iter().find(|c| c.len() != size * size) {
        return Err(Error::InvalidInput(format!(
            "centroid of dimension {} does not match kernel size {size}",
            c.len()
        )));
    }
    let (on_t, off_t) = templates(size)?;
    let on_corr: Vec<f64> = centroids.iter().map(|c| pearson(c, &on_t)).collect();
    let off_corr: Vec<f64> = centroids.iter().map(|c| pearson(c, &off_t)).collect();

    let all: Vec<usize> = (0..centroids.len()).collect();
    let on = argmax_unique(&all, |i| on_corr[i])?;
    let rest: Vec<usize> = all.iter().copied().filter(|&i| i != on).collect();
    let off = argmax_unique(&rest, |i| off_corr[i])?;

    let mut labels = Vec::with_capacity(centroids.len());
    let mut scores = Vec::with_capacity(centroids.len());
    let mut confident = Vec::with_capacity(centroids.len());
    for i in all {
        if i == on {
            labels.push(ClusterLabel::OnCenter);
            scores.push(on_corr[i]);
            confident.push(on_corr[i] >= CORRELATION_FLOOR);
        } else if i == off {
            labels.push(ClusterLabel::OffCenter);
            scores.push(off_corr[i]);
            confident.push(off_corr[i] >= CORRELATION_FLOOR);
        } else {
            let s = on_corr[i].max(off_corr[i]);
            labels.push(ClusterLabel::Other);
            scores.push(s);
            confident.push(s < CORRELATION_FLOOR);
        }
    }
    Ok(Labeling {
        labels,
        scores,
        confident,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClusterLabel::*;

    #[test]
    fn templates_and_flat_vector() {
        let (on_t, off_t) = templates(7).unwrap();
        let l = label_clusters(&[on_t.clone(), off_t.clone(), vec![0.5; 49]], 7).unwrap();
        assert_eq!(l.labels, vec![OnCenter, OffCenter, Other]);
        assert!((l.scores[0] - 1.0).abs() < 1e-12);
        assert!((l.scores[1] - 1.0).abs() < 1e-12);
        assert_eq!(l.scores[2], 0.0);
        assert_eq!(l.confident, vec![true, true, true]);
    }

    #[test]
    fn swapped_templates_swap_labels() {
        let (on_t, off_t) = templates(5).unwrap();
        let l = label_clusters(&[off_t, vec![0.5; 25], on_t], 5).unwrap();
        assert_eq!(l.labels, vec![OffCenter, Other, OnCenter]);
    }

    #[test]
    fn tie_is_ambiguous() {
        let (on_t, off_t) = templates(3).unwrap();
        let err = label_clusters(&[on_t.clone(), on_t, off_t], 3).unwrap_err();
        assert!(matches!(err, Error::AmbiguousLabeling(0, 1)));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(label_clusters(&[vec![0.0; 9], vec![1.0; 9], vec![0.5; 8]], 3).is_err());
        assert!(label_clusters(&[vec![0.0; 9]], 3).is_err());
    }

    #[test]
    fn pearson_basics() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[3.0, 2.0, 1.0]), 0.0);
    }
}
