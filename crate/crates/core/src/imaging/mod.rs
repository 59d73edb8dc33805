//! Grayscale images, binary masks, PGM I/O, downsampling and phantoms.

mod pgm;
mod phantom;
mod resize;

pub use pgm::{load_pgm, save_mask_pgm, save_pgm};
pub use phantom::{generate_phantom, Lesion, PhantomSpec};
pub use resize::{resize_area, resize_mask_majority};

use crate::{Error, Result};

/// Row-major grid of intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Dimension {
                expected: width * height,
                actual: data.len(),
            });
        }
        if let Some(pos) = data
            .iter()
            .position(|v| !v.is_finite() || *v < 0.0 || *v > 1.0)
        {
            return Err(Error::InvalidData(format!(
                "intensity {} at index {pos} is outside [0, 1]",
                data[pos]
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image from arbitrary finite values by min-max rescaling to
    /// `[0, 1]`. A constant input maps to all zeros.
    pub fn from_min_max(width: usize, height: usize, raw: &[f64]) -> Result<Self> {
        let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let data = if raw.is_empty() || !(hi > lo) {
            vec![0.0; raw.len()]
        } else {
            let span = hi - lo;
            raw.iter()
                .map(|v| ((v - lo) / span).clamp(0.0, 1.0))
                .collect()
        };
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Pixel lookup with clamp-to-edge addressing.
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.get(cx, cy)
    }

    /// Rectangular sub-image starting at `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if x0 + w > self.width || y0 + h > self.height {
            return Err(Error::InvalidData(format!(
                "crop {w}x{h}+{x0}+{y0} exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            data.extend_from_slice(&self.data[y * self.width + x0..y * self.width + x0 + w]);
        }
        Self::new(w, h, data)
    }

    /// Mask of pixels strictly above `threshold`.
    pub fn threshold(&self, threshold: f64) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.data.iter().map(|&v| u8::from(v > threshold)).collect(),
        }
    }
}

/// Row-major per-pixel class assignment with values in `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::Dimension {
                expected: width * height,
                actual: bits.len(),
            });
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidData(format!(
                "mask value {} at index {pos} is not binary",
                bits[pos]
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![0; width * height],
        }
    }

    pub fn ones(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![1; width * height],
        }
    }

    /// A flat assignment viewed as a single-row mask.
    pub fn from_vector(bits: Vec<u8>) -> Result<Self> {
        let n = bits.len();
        Self::new(n, 1, bits)
    }

    /// Reinterprets the bits with new dimensions of the same area.
    pub fn reshape(self, width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, self.bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x] == 1
    }

    /// Number of foreground pixels.
    pub fn area(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn invert(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| 1 - b).collect(),
        }
    }

    pub fn to_image(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.bits.iter().map(|&b| f64::from(b)).collect(),
        }
    }
}
