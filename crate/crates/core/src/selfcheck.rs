//! Property suites run by `retina selfcheck` and the acceptance tests.
//!
//! Each suite compares the implementation against an independent route from
//! [`crate::oracle`] and reports pass/fail with a short detail line.

use std::time::Instant;

use serde::Serialize;

use crate::analytics::kmeans::{kmeans, lloyd_run, KMeansConfig};
use crate::dog::{dog_continuous, dog_rodieck, generate_kernel, sigma_from_gamma, DoGSpec, Polarity, RodieckParams};
use crate::error::Result;
use crate::oracle::{optimal_partition_inertia, sign_changes};
use crate::rng::Stream;

pub const ZERO_CROSSING: &str = "zero-crossing law";
pub const BALANCE: &str = "balance";
pub const SYMMETRY: &str = "dihedral symmetry";
pub const MAPPING: &str = "rodieck mapping";
pub const KMEANS_OPTIMUM: &str = "k-means small-instance optimum";
pub const KMEANS_DESCENT: &str = "k-means descent";

pub const ZERO_CROSSING_TOL: f64 = 1e-9;
pub const BALANCE_TOL: f64 = 1e-12;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const MAPPING_TOL: f64 = 1e-12;

/// Deliberate faults for exercising the checks themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Surround width inflated by 1%.
    TamperedSigma,
}

impl Fault {
    fn sigma(self, size: usize, gamma: f64) -> Result<f64> {
        let s = sigma_from_gamma(size, gamma)?;
        Ok(match self {
            Fault::None => s,
            Fault::TamperedSigma => s * 1.01,
        })
    }

    fn spec(self, size: usize, gamma: f64, polarity: Polarity) -> Result<DoGSpec> {
        DoGSpec::with_sigma(size, gamma, self.sigma(size, gamma)?, polarity)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: f64,
}

fn timed(name: &'static str, check: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckResult {
        name,
        passed,
        detail,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Odd sizes 3..=15 against γ = 0.1..=0.9: the radial profile must change
/// sign exactly once on (0, k), at γ·k/2.
pub fn zero_crossing_law(fault: Fault) -> CheckResult {
    timed(ZERO_CROSSING, || {
        let mut worst = 0.0f64;
        for size in (3..=15).step_by(2) {
            for step in 1..=9 {
                let gamma = step as f64 / 10.0;
                let spec = fault.spec(size, gamma, Polarity::OnCenter)?;
                let profile = |r: f64| dog_continuous(r, 0.0, &spec, 1.0, 1.0).unwrap_or(f64::NAN);
                let roots = sign_changes(profile, 0.0, size as f64, 2048);
                if roots.len() != 1 {
                    return Ok((false, format!("k={size} γ={gamma}: {} sign changes", roots.len())));
                }
                let err = (roots[0] - gamma * size as f64 / 2.0).abs();
                worst = worst.max(err);
                if err >= ZERO_CROSSING_TOL {
                    return Ok((false, format!("k={size} γ={gamma}: root {} off by {err:.3e}", roots[0])));
                }
            }
        }
        Ok((true, format!("63 profiles, max |r0 - γk/2| = {worst:.2e}")))
    })
}

/// Random sizes in 3..=15 and γ in [0.05, 0.95), skipping degenerate grids.
fn random_specs(n: usize, seed: u64, fault: Fault) -> Result<Vec<DoGSpec>> {
    let mut stream = Stream::new(seed);
    let mut specs = Vec::with_capacity(n);
    while specs.len() < n {
        let size = 3 + 2 * stream.below(7);
        let gamma = stream.uniform(0.05, 0.95);
        let polarity = if stream.coin() { Polarity::OnCenter } else { Polarity::OffCenter };
        let spec = fault.spec(size, gamma, polarity)?;
        if generate_kernel(&spec).is_ok() {
            specs.push(spec);
        }
    }
    Ok(specs)
}

pub fn balance(count: usize, seed: u64, fault: Fault) -> CheckResult {
    timed(BALANCE, || {
        let mut worst = 0.0f64;
        for spec in random_specs(count, seed, fault)? {
            let k = generate_kernel(&spec)?;
            let errs = [
                (k.positive_sum() - 0.5).abs(),
                (k.negative_sum() + 0.5).abs(),
                k.weights().iter().sum::<f64>().abs(),
            ];
            let err = errs.into_iter().fold(0.0, f64::max);
            worst = worst.max(err);
            if err > BALANCE_TOL {
                return Ok((false, format!("{spec:?}: sum error {err:.3e}")));
            }
        }
        Ok((true, format!("{count} kernels, max error {worst:.2e}")))
    })
}

pub fn dihedral_symmetry(count: usize, seed: u64, fault: Fault) -> CheckResult {
    timed(SYMMETRY, || {
        let mut worst = 0.0f64;
        for spec in random_specs(count, seed, fault)? {
            let k = generate_kernel(&spec)?;
            for image in k.dihedral_images() {
                let d = image.max_abs_diff(&k);
                worst = worst.max(d);
                if d > SYMMETRY_TOL {
                    return Ok((false, format!("{spec:?}: asymmetry {d:.3e}")));
                }
            }
        }
        Ok((true, format!("{count} kernels x 8 images, max deviation {worst:.2e}")))
    })
}

/// The amplitude/spread form with mapped parameters must agree with the
/// ratio form at random points.
pub fn rodieck_mapping(specs: usize, points: usize, seed: u64) -> CheckResult {
    timed(MAPPING, || {
        let mut stream = Stream::new(seed);
        let mut worst = 0.0f64;
        for _ in 0..specs {
            let size = 3 + 2 * stream.below(7);
            let gamma = stream.uniform(0.05, 0.95);
            let spec = DoGSpec::new(size, gamma, Polarity::OnCenter)?;
            let ac = stream.uniform(0.5, 2.0);
            // keep ac/γ² > as so the amplitude ordering holds
            let as_ = stream.uniform(0.1, 1.0) * ac;
            let params = RodieckParams::from_ratio_form(ac, as_, gamma, spec.sigma());
            let half = size as f64 / 2.0;
            for _ in 0..points {
                let x = stream.uniform(-half, half);
                let y = stream.uniform(-half, half);
                let a = dog_rodieck(x, y, &params)?;
                let b = dog_continuous(x, y, &spec, ac, as_)?;
                let d = (a - b).abs();
                worst = worst.max(d);
                if d > MAPPING_TOL {
                    return Ok((false, format!("k={size} γ={gamma} at ({x}, {y}): {a} vs {b}")));
                }
            }
        }
        Ok((true, format!("{specs} specs x {points} points, max deviation {worst:.2e}")))
    })
}

/// Random small instance: 4..=10 planar points, k in 1..=3.
pub fn small_instance(stream: &mut Stream) -> (Vec<Vec<f64>>, usize) {
    let n = 4 + stream.below(7);
    let k = 1 + stream.below(3);
    let points = (0..n)
        .map(|_| vec![stream.uniform(0.0, 1.0), stream.uniform(0.0, 1.0)])
        .collect();
    (points, k)
}

pub fn kmeans_optimum(instances: usize, restarts: usize, seed: u64) -> CheckResult {
    timed(KMEANS_OPTIMUM, || {
        let mut stream = Stream::new(seed);
        let mut hits = 0;
        for i in 0..instances {
            let (points, k) = small_instance(&mut stream);
            let config = KMeansConfig {
                k,
                restarts,
                seed: seed.wrapping_add(i as u64),
                ..KMeansConfig::default()
            };
            let got = kmeans(&points, &config)?.inertia;
            let best = optimal_partition_inertia(&points, k);
            if (got - best).abs() <= 1e-9 * best.max(1e-12) + 1e-15 {
                hits += 1;
            }
        }
        Ok((hits == instances, format!("{hits}/{instances} instances optimal")))
    })
}

pub fn kmeans_descent(instances: usize, seed: u64) -> CheckResult {
    timed(KMEANS_DESCENT, || {
        let mut stream = Stream::new(seed);
        let mut steps = 0;
        for i in 0..instances {
            let n = 30 + stream.below(100);
            let dim = 2 + stream.below(8);
            let points: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| stream.unit_f64()).collect()).collect();
            let config = KMeansConfig {
                k: 2 + stream.below(6),
                tol: 0.0,
                seed: seed ^ i as u64,
                ..KMeansConfig::default()
            };
            let run = lloyd_run(&points, &config, 0);
            steps += run.history.len();
            if let Some(w) = run.history.windows(2).find(|w| w[1] > w[0]) {
                return Ok((false, format!("instance {i}: inertia rose from {} to {}", w[0], w[1])));
            }
        }
        Ok((true, format!("{instances} runs, {steps} iterations, never increasing")))
    })
}

/// Every suite with its default size.
pub fn run_all(fault: Fault) -> Vec<CheckResult> {
    vec![
        zero_crossing_law(fault),
        balance(1000, 1, fault),
        dihedral_symmetry(1000, 2, fault),
        rodieck_mapping(20, 100, 3),
        kmeans_optimum(100, 50, 4),
        kmeans_descent(50, 5),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        for r in run_all(Fault::None) {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn tampered_sigma_breaks_zero_crossing() {
        let r = zero_crossing_law(Fault::TamperedSigma);
        assert!(!r.passed);
        assert_eq!(r.name, ZERO_CROSSING);
    }
}
