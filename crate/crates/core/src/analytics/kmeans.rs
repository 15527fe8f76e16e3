//! Lloyd's k-means with k-means++ seeding and seeded restarts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{mix, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once an iteration improves inertia by at most this fraction.
    pub tol: f64,
    pub seed: u64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            k: 3,
            restarts: 10,
            max_iters: 300,
            tol: 1e-6,
            seed: 0,
        }
    }
}

impl KMeansConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidConfig(
                "k, restarts and max_iters must all be positive".into(),
            ));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be non-negative, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Restart that produced this result.
    pub restart: usize,
    /// Inertia after each assignment step of the winning restart.
    pub history: Vec<f64>,
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = squared_distance(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn count_distinct(points: &[Vec<f64>]) -> usize {
    // +0.0 and -0.0 compare equal, so canonicalize before hashing bits
    let mut keys: Vec<Vec<u64>> = points
        .iter()
        .map(|p| p.iter().map(|v| (v + 0.0).to_bits()).collect())
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

fn seed_plus_plus(points: &[Vec<f64>], k: usize, stream: &mut Stream) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[stream.below(points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| squared_distance(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let target = stream.unit_f64() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &w) in d2.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            chosen = Some(i);
            if acc > target {
                break;
            }
        }
        let idx = chosen.expect("at least k distinct points");
        let c = points[idx].clone();
        for (p, d) in points.iter().zip(d2.iter_mut()) {
            *d = d.min(squared_distance(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// One seeded Lloyd run. Exposed for tests that inspect the descent trace.
pub fn lloyd_run(points: &[Vec<f64>], config: &KMeansConfig, restart: usize) -> KMeansResult {
    let k = config.k;
    let dim = points[0].len();
    let mut stream = Stream::new(mix(config.seed, restart as u64));
    let mut centroids = seed_plus_plus(points, k, &mut stream);
    let mut assignments = vec![usize::MAX; points.len()];
    let mut dists = vec![0.0; points.len()];
    let mut history = Vec::new();

    for iter in 0..config.max_iters {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let (j, d) = nearest(p, &centroids);
            if assignments[i] != j {
                assignments[i] = j;
                changed = true;
            }
            dists[i] = d;
        }
        let inertia: f64 = dists.iter().sum();
        let prev = history.last().copied();
        history.push(inertia);
        if !changed || iter + 1 == config.max_iters {
            break;
        }
        if let Some(prev) = prev {
            if prev - inertia <= config.tol * prev {
                break;
            }
        }

        let mut counts = vec![0usize; k];
        for &a in &assignments {
            counts[a] += 1;
        }
        // refill empty clusters with the worst-fit point of a shared cluster
        for j in 0..k {
            if counts[j] > 0 {
                continue;
            }
            let donor = (0..points.len())
                .filter(|&i| counts[assignments[i]] > 1)
                .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
            if let Some(i) = donor {
                counts[assignments[i]] -= 1;
                assignments[i] = j;
                counts[j] = 1;
                dists[i] = 0.0;
            }
        }

        let mut sums = vec![vec![0.0; dim]; k];
        for (p, &a) in points.iter().zip(&assignments) {
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for (j, sum) in sums.into_iter().enumerate() {
            if counts[j] > 0 {
                let n = counts[j] as f64;
                centroids[j] = sum.into_iter().map(|s| s / n).collect();
            }
        }
    }

    let inertia = *history.last().expect("at least one iteration");
    KMeansResult {
        assignments,
        centroids,
        inertia,
        restart,
        history,
    }
}

/// Best of `config.restarts` Lloyd runs, ranked by `(inertia, restart)`.
pub fn kmeans(points: &[Vec<f64>], config: &KMeansConfig) -> Result<KMeansResult> {
    config.validate()?;
    if let Some(p) = points.first() {
        if points.iter().any(|q| q.len() != p.len()) {
            return Err(Error::InvalidInput("points have mixed dimensions".into()));
        }
    }
    let distinct = count_distinct(points);
    if distinct < config.k {
        return Err(Error::InsufficientPoints {
            distinct,
            k: config.k,
        });
    }
    let best = (0..config.restarts)
        .into_par_iter()
        .map(|r| lloyd_run(points, config, r))
        .min_by(|a, b| a.inertia.total_cmp(&b.inertia).then(a.restart.cmp(&b.restart)))
        .expect("restarts > 0");
    Ok(best)
}
