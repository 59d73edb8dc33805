//! Synthetic disc phantoms with exact ground-truth masks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{BinaryMask, GrayImage};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lesion {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
    pub intensity: f64,
}

impl Lesion {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        let dx = x as f64 - self.cx;
        let dy = y as f64 - self.cy;
        dx * dx + dy * dy <= self.radius * self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub width: usize,
    pub height: usize,
    pub lesions: Vec<Lesion>,
    pub background: f64,
    /// Half-width of the uniform additive noise.
    pub noise: f64,
    pub seed: u64,
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Spec("frame must be non-empty".into()));
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.background) {
            return Err(Error::Spec(format!(
                "background {} not in [0, 1]",
                self.background
            )));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::Spec(format!(
                "noise amplitude {} must be >= 0",
                self.noise
            )));
        }
        for (k, l) in self.lesions.iter().enumerate() {
            if !(l.radius > 0.0 && l.radius.is_finite()) {
                return Err(Error::Spec(format!("lesion {k}: radius must be > 0")));
            }
            if !unit(l.intensity) {
                return Err(Error::Spec(format!(
                    "lesion {k}: intensity {} not in [0, 1]",
                    l.intensity
                )));
            }
            let fits = l.cx - l.radius >= 0.0
                && l.cy - l.radius >= 0.0
                && l.cx + l.radius <= (self.width - 1) as f64
                && l.cy + l.radius <= (self.height - 1) as f64;
            if !fits {
                return Err(Error::Spec(format!(
                    "lesion {k} at ({}, {}) radius {} leaves the {}x{} frame",
                    l.cx, l.cy, l.radius, self.width, self.height
                )));
            }
        }
        Ok(())
    }
}

/// Renders the phantom and its truth mask. Later lesions paint over earlier
/// ones; noise is added everywhere and the result clamped to `[0, 1]`.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<(GrayImage, BinaryMask)> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut data = vec![spec.background; w * h];
    let mut bits = vec![0u8; w * h];
    for lesion in &spec.lesions {
        for y in 0..h {
            for x in 0..w {
                if lesion.contains(x, y) {
                    data[y * w + x] = lesion.intensity;
                    bits[y * w + x] = 1;
                }
            }
        }
    }
    if spec.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        for v in &mut data {
            let n: f64 = rng.gen_range(-spec.noise..=spec.noise);
            *v = (*v + n).clamp(0.0, 1.0);
        }
    }
    Ok((GrayImage::new(w, h, data)?, BinaryMask::new(w, h, bits)?))
}
