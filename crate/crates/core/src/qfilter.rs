//! Quantum-inspired multilevel image transformation.
//!
//! Each pixel is compared with its 3x3 neighbourhood through the overlap of
//! two single-qubit states, one encoding the pairwise intensity difference
//! and one encoding the neighbourhood mean, and the overlaps are passed
//! through a multilevel sigmoid whose level is chosen from an adaptive gray
//! level table. A single pass is applied.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::imaging::GrayImage;
use crate::{Error, Result};

/// Border rule for neighbours outside the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Padding {
    /// Clamp to the nearest edge pixel.
    #[default]
    Replicate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    /// Sigmoid steepness.
    pub mu: f64,
    /// Number of gray levels in the level table.
    pub levels: usize,
    /// Quantile placed at the second level.
    pub percentile: f64,
    pub padding: Padding,
    pub normalize_output: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            mu: 0.4,
            levels: 8,
            percentile: 0.9,
            padding: Padding::Replicate,
            normalize_output: true,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Config(format!(
                "filter mu must be > 0, got {}",
                self.mu
            )));
        }
        if self.levels < 2 {
            return Err(Error::Config(format!(
                "filter levels must be >= 2, got {}",
                self.levels
            )));
        }
        if !(self.percentile > 0.0 && self.percentile < 1.0) {
            return Err(Error::Config(format!(
                "filter percentile must be in (0, 1), got {}",
                self.percentile
            )));
        }
        Ok(())
    }
}

/// Ascending gray level table `0 = w_1 < ... < w_L = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaLevels(Vec<f64>);

impl OmegaLevels {
    pub fn evenly_spaced(levels: usize) -> Self {
        let last = (levels - 1) as f64;
        Self((0..levels).map(|k| k as f64 / last).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Relative intensity difference `1 - (I[i+p, j+q] - I[i, j])` in `[0, 2]`,
/// with `i` the row and `j` the column.
pub fn alpha_pq(img: &GrayImage, i: usize, j: usize, p: isize, q: isize) -> f64 {
    let centre = img.get(j, i);
    let neighbour = img.get_clamped(j as isize + q, i as isize + p);
    1.0 - (neighbour - centre)
}

/// Mean intensity of the replicate-padded 3x3 patch centred on row `i`,
/// column `j`.
pub fn neighborhood_sum(img: &GrayImage, i: usize, j: usize) -> f64 {
    let mut sum = 0.0;
    for p in -1..=1 {
        for q in -1..=1 {
            sum += img.get_clamped(j as isize + q, i as isize + p);
        }
    }
    sum / 9.0
}

/// `<phi(alpha)|omega(s)>` for the real states `cos(pi/2 t)|0> + sin(pi/2 t)|1>`.
pub fn overlap(alpha: f64, s: f64) -> f64 {
    (FRAC_PI_2 * alpha).cos() * (FRAC_PI_2 * s).cos()
        + (FRAC_PI_2 * alpha).sin() * (FRAC_PI_2 * s).sin()
}

/// Linear-interpolation quantile of `values` at fraction `p`.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Adaptive level table: `w_2` is the configured quantile of the image and
/// the remaining levels are evenly spaced up to 1.
pub fn omega_levels(img: &GrayImage, cfg: &FilterConfig) -> OmegaLevels {
    let levels = cfg.levels;
    if levels == 2 || img.is_empty() {
        return OmegaLevels::evenly_spaced(levels);
    }
    let second = quantile(img.data(), cfg.percentile);
    if second <= 0.0 || second >= 1.0 {
        return OmegaLevels::evenly_spaced(levels);
    }
    let step = (1.0 - second) / (levels - 2) as f64;
    let mut values = Vec::with_capacity(levels);
    values.push(0.0);
    values.extend((0..levels - 2).map(|k| second + k as f64 * step));
    values.push(1.0);
    OmegaLevels(values)
}

/// `s / (w_{k+1} - w_k)` for the highest level `w_k <= s`, with `k`
/// clamped to the second-to-last level.
pub fn lambda_for(s: f64, omegas: &OmegaLevels) -> f64 {
    let w = omegas.values();
    let k = w
        .iter()
        .rposition(|&level| level <= s)
        .unwrap_or(0)
        .min(w.len() - 2);
    s / (w[k + 1] - w[k])
}

/// `1 / (lambda + exp(-mu (x - eta)))`.
pub fn multilevel_sigmoid(x: f64, lambda: f64, mu: f64, eta: f64) -> f64 {
    1.0 / (lambda + (-mu * (x - eta)).exp())
}

/// Filter output for a single pixel before normalization.
fn pixel_response(img: &GrayImage, i: usize, j: usize, mu: f64, omegas: &OmegaLevels) -> f64 {
    let s = neighborhood_sum(img, i, j);
    let lambda = lambda_for(s, omegas);
    let centre = img.get(j, i);
    let mut z = 0.0;
    for p in -1..=1 {
        for q in -1..=1 {
            let x = centre * overlap(alpha_pq(img, i, j, p, q), s);
            z += multilevel_sigmoid(x, lambda, mu, s);
        }
    }
    z
}

/// Unnormalized filter response for every pixel using a given level table.
pub fn filter_raw_with(img: &GrayImage, cfg: &FilterConfig, omegas: &OmegaLevels) -> Vec<f64> {
    let w = img.width();
    (0..img.height())
        .into_par_iter()
        .flat_map_iter(|i| (0..w).map(move |j| pixel_response(img, i, j, cfg.mu, omegas)))
        .collect()
}

/// Result of a filter pass together with the level table it used.
#[derive(Debug, Clone)]
pub struct FilterOutput {
    pub image: GrayImage,
    pub omegas: OmegaLevels,
    pub raw_min: f64,
    pub raw_max: f64,
}

/// Applies one pass of the transformation, returning diagnostics.
pub fn apply_filter_detailed(img: &GrayImage, cfg: &FilterConfig) -> Result<FilterOutput> {
    cfg.validate()?;
    if img.is_empty() {
        return Err(Error::InvalidData("cannot filter an empty image".into()));
    }
    let omegas = omega_levels(img, cfg);
    let raw = filter_raw_with(img, cfg, &omegas);
    let raw_min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let raw_max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let image = if cfg.normalize_output {
        GrayImage::from_min_max(img.width(), img.height(), &raw)?
    } else {
        // Unnormalized values can exceed 1; clamp only to satisfy the type.
        let data = raw.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        GrayImage::new(img.width(), img.height(), data)?
    };
    Ok(FilterOutput {
        image,
        omegas,
        raw_min,
        raw_max,
    })
}

pub fn apply_filter(img: &GrayImage, cfg: &FilterConfig) -> Result<GrayImage> {
    apply_filter_detailed(img, cfg).map(|out| out.image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn img(w: usize, h: usize, data: &[f64]) -> GrayImage {
        GrayImage::new(w, h, data.to_vec()).unwrap()
    }

    #[test]
    fn alpha_examples() {
        let u = GrayImage::filled(3, 3, 0.4).unwrap();
        for p in -1..=1 {
            for q in -1..=1 {
                assert_eq!(alpha_pq(&u, 1, 1, p, q), 1.0);
            }
        }
        let a = img(2, 1, &[0.2, 0.7]);
        assert_abs_diff_eq!(alpha_pq(&a, 0, 0, 0, 1), 0.5, epsilon = 1e-15);
        let b = img(2, 1, &[1.0, 0.0]);
        assert_eq!(alpha_pq(&b, 0, 0, 0, 1), 2.0);
        // Replicate padding: the left neighbour of column 0 is itself.
        assert_eq!(alpha_pq(&b, 0, 0, 0, -1), 1.0);
    }

    #[test]
    fn neighbourhood_examples() {
        let u = GrayImage::filled(4, 3, 0.3).unwrap();
        assert_abs_diff_eq!(neighborhood_sum(&u, 0, 3), 0.3, epsilon = 1e-15);
        let z = GrayImage::filled(3, 3, 0.0).unwrap();
        assert_eq!(neighborhood_sum(&z, 1, 1), 0.0);
        let plus = img(3, 3, &[0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0]);
        // Padded patch around (0, 0): rows [0,0,1], [0,0,1], [1,1,1].
        assert_abs_diff_eq!(neighborhood_sum(&plus, 0, 0), 5.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn overlap_examples() {
        assert_abs_diff_eq!(overlap(0.3, 0.3), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(overlap(1.2, 0.2), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            overlap(0.5, 0.0),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert_abs_diff_eq!(quantile(&[0.0, 1.0], 0.9), 0.9);
        assert_abs_diff_eq!(quantile(&[0.0, 10.0, 20.0, 30.0], 0.5), 15.0);
    }

    fn ramp() -> GrayImage {
        let n = 101;
        let data: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        img(n, 1, &data)
    }

    #[test]
    fn omega_on_ramp() {
        // Quantile of 101 evenly spaced points at 0.9 sits on sample 90.
        let w = omega_levels(&ramp(), &FilterConfig::default());
        let expected = [0.0, 0.9, 0.91667, 0.93333, 0.95, 0.96667, 0.98333, 1.0];
        assert_eq!(w.len(), 8);
        for (a, b) in w.values().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-5);
        }
    }

    #[test]
    fn omega_fallback_and_endpoints() {
        let zeros = GrayImage::filled(4, 4, 0.0).unwrap();
        let w = omega_levels(&zeros, &FilterConfig::default());
        for (k, v) in w.values().iter().enumerate() {
            assert_abs_diff_eq!(*v, k as f64 / 7.0, epsilon = 1e-15);
        }
        let cfg = FilterConfig {
            levels: 2,
            percentile: 0.3,
            ..FilterConfig::default()
        };
        assert_eq!(omega_levels(&ramp(), &cfg).values(), &[0.0, 1.0]);
    }

    #[test]
    fn lambda_examples() {
        let even = OmegaLevels::evenly_spaced(8);
        assert_eq!(lambda_for(0.0, &even), 0.0);
        assert_abs_diff_eq!(lambda_for(1.0, &even), 7.0, epsilon = 1e-12);
        let w = omega_levels(&ramp(), &FilterConfig::default());
        assert_abs_diff_eq!(lambda_for(0.95, &w), 57.0, epsilon = 1e-9);
    }

    #[test]
    fn sigmoid_examples() {
        assert_eq!(multilevel_sigmoid(0.3, 1.0, 0.4, 0.3), 0.5);
        assert_eq!(multilevel_sigmoid(0.3, 0.0, 0.4, 0.3), 1.0);
        assert_eq!(multilevel_sigmoid(0.6, 7.0, 0.4, 0.6), 0.125);
    }

    #[test]
    fn uniform_image_normalizes_to_zero() {
        let u = GrayImage::filled(5, 4, 0.6).unwrap();
        let cfg = FilterConfig::default();
        let raw = filter_raw_with(&u, &cfg, &omega_levels(&u, &cfg));
        assert!(raw.iter().all(|&v| v == raw[0]));
        let out = apply_filter(&u, &cfg).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn filter_is_deterministic_and_bounded() {
        let data: Vec<f64> = (0..30).map(|k| ((k * 37) % 11) as f64 / 10.0).collect();
        let im = img(6, 5, &data);
        let a = apply_filter(&im, &FilterConfig::default()).unwrap();
        let b = apply_filter(&im, &FilterConfig::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn rejects_bad_config() {
        let im = GrayImage::filled(2, 2, 0.5).unwrap();
        for cfg in [
            FilterConfig {
                mu: 0.0,
                ..Default::default()
            },
            FilterConfig {
                levels: 1,
                ..Default::default()
            },
            FilterConfig {
                percentile: 1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(apply_filter(&im, &cfg), Err(Error::Config(_))));
        }
    }
}
