//! Difference-of-Gaussians receptive fields.
//!
//! Two parameterizations are provided. [`dog_rodieck`] is the classic
//! amplitude/spread form `K1·exp(-r²/s1) − K2·exp(-r²/s2)`, where the spreads
//! divide `r²` directly. [`dog_continuous`] is the ratio form used for kernel
//! synthesis:
//!
//! ```text
//! (A_c / γ²)·exp(-r² / (2γ²σ²)) − A_s·exp(-r² / (2σ²))
//! ```
//!
//! With `σ` chosen by [`sigma_from_gamma`] and `A_c = A_s`, the ratio form
//! crosses zero exactly at radius `γ·k/2`, so `γ` directly controls the
//! fraction of the kernel occupied by the center.
//!
//! [`generate_kernel`] samples the ratio form on the integer pixel grid
//! centered on the middle pixel of an odd-sized kernel and rescales the two
//! sign groups so that positives sum to `+0.5` and negatives to `-0.5`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of the central lobe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    /// Excitatory center: positive center, negative surround.
    #[serde(rename = "on")]
    OnCenter,
    /// Inhibitory center: negative center, positive surround.
    #[serde(rename = "off")]
    OffCenter,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::OnCenter => 1.0,
            Polarity::OffCenter => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::OnCenter => "on",
            Polarity::OffCenter => "off",
        }
    }
}

/// Parameters of the amplitude/spread DoG form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RodieckParams {
    pub k1: f64,
    pub k2: f64,
    pub s1: f64,
    pub s2: f64,
}

impl RodieckParams {
    pub fn new(k1: f64, k2: f64, s1: f64, s2: f64) -> Result<Self> {
        let params = Self { k1, k2, s1, s2 };
        params.validate()?;
        Ok(params)
    }

    /// Expresses the ratio form with amplitudes `(ac, as_)` in this
    /// parameterization. The two forms then agree pointwise.
    ///
    /// The result is not validated: `k1 > k2` only holds when
    /// `ac / γ² > as_`.
    pub fn from_ratio_form(ac: f64, as_: f64, gamma: f64, sigma: f64) -> Self {
        let two_sigma_sq = 2.0 * sigma * sigma;
        Self {
            k1: ac / (gamma * gamma),
            k2: as_,
            s1: gamma * gamma * two_sigma_sq,
            s2: two_sigma_sq,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.k1, self.k2, self.s1, self.s2]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !all_positive {
            return Err(Error::InvalidParams(format!(
                "amplitudes and spreads must be finite and positive: {self:?}"
            )));
        }
        if self.k1 <= self.k2 {
            return Err(Error::InvalidParams(format!(
                "center amplitude k1 = {} must exceed surround amplitude k2 = {}",
                self.k1, self.k2
            )));
        }
        if self.s2 <= self.s1 {
            return Err(Error::InvalidParams(format!(
                "surround spread s2 = {} must exceed center spread s1 = {}",
                self.s2, self.s1
            )));
        }
        Ok(())
    }
}

/// `K1·exp(-(x²+y²)/s1) − K2·exp(-(x²+y²)/s2)`.
pub fn dog_rodieck(x: f64, y: f64, params: &RodieckParams) -> Result<f64> {
    params.validate()?;
    let r2 = x * x + y * y;
    Ok(params.k1 * (-r2 / params.s1).exp() - params.k2 * (-r2 / params.s2).exp())
}

fn check_size(size: usize) -> Result<()> {
    if size < 3 || size.is_multiple_of(2) {
        return Err(Error::InvalidSize(size));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidGamma(gamma));
    }
    Ok(())
}

/// Surround standard deviation that puts the zero crossing at radius
/// `gamma * size / 2`: `(k/4)·sqrt((1 − γ²) / −ln γ)`.
pub fn sigma_from_gamma(size: usize, gamma: f64) -> Result<f64> {
    check_size(size)?;
    check_gamma(gamma)?;
    let k = size as f64;
    Ok(k / 4.0 * ((1.0 - gamma * gamma) / -gamma.ln()).sqrt())
}

/// Full parameterization of one center-surround kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoGSpec {
    size: usize,
    gamma: f64,
    sigma: f64,
    polarity: Polarity,
}

impl DoGSpec {
    /// Builds a spec with `sigma` from [`sigma_from_gamma`].
    pub fn new(size: usize, gamma: f64, polarity: Polarity) -> Result<Self> {
        let sigma = sigma_from_gamma(size, gamma)?;
        Ok(Self {
            size,
            gamma,
            sigma,
            polarity,
        })
    }

    /// Builds a spec with an explicit surround width.
    pub fn with_sigma(size: usize, gamma: f64, sigma: f64, polarity: Polarity) -> Result<Self> {
        check_size(size)?;
        check_gamma(gamma)?;
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParams(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self {
            size,
            gamma,
            sigma,
            polarity,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn with_polarity(mut self, polarity: Polarity) -> Self {
        self.polarity = polarity;
        self
    }
}

/// Evaluates the ratio-form DoG at `(x, y)`, negated for off-center specs.
pub fn dog_continuous(x: f64, y: f64, spec: &DoGSpec, ac: f64, as_: f64) -> Result<f64> {
    if !(ac.is_finite() && ac > 0.0 && as_.is_finite() && as_ > 0.0) {
        return Err(Error::InvalidParams(format!(
            "amplitudes must be positive, got ac = {ac}, as = {as_}"
        )));
    }
    Ok(spec.polarity.sign() * ratio_form(x * x + y * y, spec.gamma, spec.sigma, ac, as_))
}

#[inline]
fn ratio_form(r2: f64, gamma: f64, sigma: f64, ac: f64, as_: f64) -> f64 {
    let g2 = gamma * gamma;
    let s2 = sigma * sigma;
    ac / g2 * (-r2 / (2.0 * g2 * s2)).exp() - as_ * (-r2 / (2.0 * s2)).exp()
}

/// A dense square weight grid, row-major with row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<f64>) -> Result<Self> {
        if size == 0 || weights.len() != size * size {
            return Err(Error::InvalidInput(format!(
                "kernel of side {size} needs {} weights, got {}",
                size * size,
                weights.len()
            )));
        }
        if let Some(bad) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite kernel weight {bad}")));
        }
        Ok(Self { size, weights })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.size + col]
    }

    pub fn center(&self) -> f64 {
        let c = self.size / 2;
        self.get(c, c)
    }

    pub fn positive_sum(&self) -> f64 {
        self.weights.iter().filter(|w| **w > 0.0).sum()
    }

    pub fn negative_sum(&self) -> f64 {
        self.weights.iter().filter(|w| **w < 0.0).sum()
    }

    pub fn positive_count(&self) -> usize {
        self.weights.iter().filter(|w| **w > 0.0).count()
    }

    pub fn negated(&self) -> Self {
        Self {
            size: self.size,
            weights: self.weights.iter().map(|w| -w).collect(),
        }
    }

    fn remap(&self, f: impl Fn(usize, usize) -> (usize, usize)) -> Self {
        let n = self.size;
        let mut weights = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                let (sr, sc) = f(r, c);
                weights[r * n + c] = self.get(sr, sc);
            }
        }
        Self { size: n, weights }
    }

    /// Quarter turn clockwise.
    pub fn rotate90(&self) -> Self {
        let n = self.size;
        self.remap(|r, c| (n - 1 - c, r))
    }

    /// Mirror left to right.
    pub fn flip_horizontal(&self) -> Self {
        let n = self.size;
        self.remap(|r, c| (r, n - 1 - c))
    }

    /// All eight images under the symmetry group of the square.
    pub fn dihedral_images(&self) -> Vec<Self> {
        let mut images = Vec::with_capacity(8);
        let mut current = self.clone();
        for _ in 0..4 {
            images.push(current.flip_horizontal());
            let next = current.rotate90();
            images.push(current);
            current = next;
        }
        images
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Samples the on-center ratio form with `A_c = A_s = 1` on the centered
/// integer grid. Entry `(row, col)` sits at offset `(col − c, row − c)`.
pub fn sample_grid(size: usize, gamma: f64, sigma: f64) -> Vec<f64> {
    let half = (size / 2) as i64;
    let mut grid = Vec::with_capacity(size * size);
    for row in 0..size as i64 {
        for col in 0..size as i64 {
            let (x, y) = (col - half, row - half);
            let r2 = (x * x + y * y) as f64;
            grid.push(ratio_form(r2, gamma, sigma, 1.0, 1.0));
        }
    }
    grid
}

/// Scale factors `(0.5 / P, 0.5 / N)` that bring the sampled positive sum
/// `P` and negative magnitude `N` to one half each.
pub fn balance_factors(spec: &DoGSpec) -> Result<(f64, f64)> {
    let grid = sample_grid(spec.size, spec.gamma, spec.sigma);
    factors_for(&grid, spec)
}

fn factors_for(grid: &[f64], spec: &DoGSpec) -> Result<(f64, f64)> {
    let positive: f64 = grid.iter().filter(|w| **w > 0.0).sum();
    let negative: f64 = -grid.iter().filter(|w| **w < 0.0).sum::<f64>();
    let missing = if positive <= 0.0 {
        Some("positive")
    } else if negative <= 0.0 {
        Some("negative")
    } else {
        None
    };
    if let Some(missing) = missing {
        return Err(Error::DegenerateKernel {
            size: spec.size,
            gamma: spec.gamma,
            missing,
        });
    }
    Ok((0.5 / positive, 0.5 / negative))
}

/// Synthesizes the balanced center-surround kernel for `spec`.
pub fn generate_kernel(spec: &DoGSpec) -> Result<Kernel> {
    let mut grid = sample_grid(spec.size, spec.gamma, spec.sigma);
    let (pos_scale, neg_scale) = factors_for(&grid, spec)?;
    for w in &mut grid {
        if *w > 0.0 {
            *w *= pos_scale;
        } else if *w < 0.0 {
            *w *= neg_scale;
        }
    }
    if spec.polarity == Polarity::OffCenter {
        for w in &mut grid {
            *w = -*w;
        }
    }
    Ok(Kernel {
        size: spec.size,
        weights: grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(size: usize, gamma: f64) -> DoGSpec {
        DoGSpec::new(size, gamma, Polarity::OnCenter).unwrap()
    }

    #[test]
    fn rodieck_at_origin_is_amplitude_difference() {
        let p = RodieckParams::new(2.0, 1.0, 1.0, 4.0).unwrap();
        assert_eq!(dog_rodieck(0.0, 0.0, &p).unwrap(), 1.0);
        assert!(dog_rodieck(100.0, 0.0, &p).unwrap().abs() < 1e-12);
        assert!(dog_rodieck(60.0, 80.0, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rodieck_rejects_inverted_params() {
        assert!(matches!(
            RodieckParams::new(1.0, 2.0, 1.0, 4.0),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            RodieckParams::new(2.0, 1.0, 4.0, 1.0),
            Err(Error::InvalidParams(_))
        ));
        let raw = RodieckParams {
            k1: 2.0,
            k2: 1.0,
            s1: 3.0,
            s2: 3.0,
        };
        assert!(dog_rodieck(0.0, 0.0, &raw).is_err());
    }

    #[test]
    fn sigma_closed_form() {
        // (9/4)·sqrt(0.75 / ln 2), evaluated independently in Python
        let s = sigma_from_gamma(9, 0.5).unwrap();
        assert!((s - 2.340_455_667_893_601_3).abs() < 1e-12, "{s}");
        let near_one = sigma_from_gamma(7, 0.999_999).unwrap();
        let limit = 7.0 / 4.0 * 2f64.sqrt();
        assert!((near_one - limit).abs() / limit < 1e-3);
    }

    #[test]
    fn sigma_rejects_bad_inputs() {
        assert!(matches!(sigma_from_gamma(9, 1.0), Err(Error::InvalidGamma(_))));
        assert!(matches!(sigma_from_gamma(9, 0.0), Err(Error::InvalidGamma(_))));
        assert!(matches!(sigma_from_gamma(9, f64::NAN), Err(Error::InvalidGamma(_))));
        assert!(matches!(sigma_from_gamma(8, 0.5), Err(Error::InvalidSize(8))));
        assert!(matches!(sigma_from_gamma(1, 0.5), Err(Error::InvalidSize(1))));
    }

    #[test]
    fn continuous_origin_and_polarity() {
        let on = spec(9, 0.5);
        assert!((dog_continuous(0.0, 0.0, &on, 1.0, 1.0).unwrap() - 3.0).abs() < 1e-15);
        let off = on.with_polarity(Polarity::OffCenter);
        assert!((dog_continuous(0.0, 0.0, &off, 1.0, 1.0).unwrap() + 3.0).abs() < 1e-15);
        assert!(dog_continuous(0.0, 0.0, &on, 0.0, 1.0).is_err());
    }

    #[test]
    fn size_three_small_gamma_has_single_positive_center() {
        let k = generate_kernel(&spec(3, 0.4)).unwrap();
        assert_eq!(k.positive_count(), 1);
        assert!((k.center() - 0.5).abs() < 1e-15);
        let edges = [k.get(0, 1), k.get(1, 0), k.get(1, 2), k.get(2, 1)];
        let corners = [k.get(0, 0), k.get(0, 2), k.get(2, 0), k.get(2, 2)];
        assert!((k.negative_sum() + 0.5).abs() < 1e-12);
        for e in edges {
            for c in corners {
                assert!(e < c && c < 0.0, "edge {e} corner {c}");
            }
        }
    }

    #[test]
    fn off_center_is_exact_negation() {
        for gamma in [0.1, 0.35, 0.6, 0.85] {
            let on = generate_kernel(&spec(7, gamma)).unwrap();
            let off = generate_kernel(&spec(7, gamma).with_polarity(Polarity::OffCenter)).unwrap();
            assert_eq!(off, on.negated());
        }
    }

    #[test]
    fn center_grows_with_gamma() {
        let small = generate_kernel(&spec(9, 0.2)).unwrap();
        let large = generate_kernel(&spec(9, 0.8)).unwrap();
        assert!(large.positive_count() > small.positive_count());
    }

    #[test]
    fn degenerate_when_center_swallows_grid() {
        // r0 = 1.485 exceeds the corner radius sqrt(2) at size 3.
        let err = generate_kernel(&spec(3, 0.99)).unwrap_err();
        assert!(matches!(err, Error::DegenerateKernel { missing: "negative", .. }));
    }

    #[test]
    fn dihedral_images_are_distinct_for_asymmetric_kernel() {
        let k = Kernel::new(3, (0..9).map(f64::from).collect()).unwrap();
        let images = k.dihedral_images();
        assert_eq!(images.len(), 8);
        for i in 0..8 {
            for j in (i + 1)..8 {
                assert_ne!(images[i], images[j]);
            }
        }
        assert_eq!(k.rotate90().rotate90().rotate90().rotate90(), k);
    }

    #[test]
    fn kernel_rejects_non_finite() {
        assert!(Kernel::new(1, vec![f64::NAN]).is_err());
        assert!(Kernel::new(2, vec![0.0; 3]).is_err());
    }
}
