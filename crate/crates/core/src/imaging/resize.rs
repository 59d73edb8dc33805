//! Area-weighted downsampling.
//!
//! Along one axis of `src` source pixels mapped onto `dst` output pixels,
//! output pixel `k` covers `[k*src, (k+1)*src)` and source pixel `s` covers
//! `[s*dst, (s+1)*dst)` in a common integer unit, so every coverage weight is
//! an exact integer and each output pixel's weights sum to `src`.

use super::{BinaryMask, GrayImage};
use crate::{Error, Result};

fn axis_weights(src: usize, dst: usize) -> Vec<Vec<(usize, u64)>> {
    (0..dst)
        .map(|k| {
            let lo = (k * src) as u64;
            let hi = ((k + 1) * src) as u64;
            let first = (lo / dst as u64) as usize;
            let last = ((hi - 1) / dst as u64) as usize;
            (first..=last)
                .filter_map(|s| {
                    let s_lo = (s * dst) as u64;
                    let s_hi = ((s + 1) * dst) as u64;
                    let w = hi.min(s_hi).saturating_sub(lo.max(s_lo));
                    (w > 0).then_some((s, w))
                })
                .collect()
        })
        .collect()
}

fn check_downsample(w: usize, h: usize, out_w: usize, out_h: usize) -> Result<()> {
    if out_w > w || out_h > h {
        return Err(Error::Unsupported(format!(
            "upscaling {w}x{h} to {out_w}x{out_h}; only downsampling is supported"
        )));
    }
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidData(
            "output dimensions must be positive".into(),
        ));
    }
    Ok(())
}

/// Downsamples by averaging each output cell's covered source area.
pub fn resize_area(img: &GrayImage, out_w: usize, out_h: usize) -> Result<GrayImage> {
    check_downsample(img.width(), img.height(), out_w, out_h)?;
    let wx = axis_weights(img.width(), out_w);
    let wy = axis_weights(img.height(), out_h);
    let total = (img.width() * img.height()) as f64;
    let mut data = Vec::with_capacity(out_w * out_h);
    for row in &wy {
        for col in &wx {
            // Accumulate deviations from one covered pixel so that a constant
            // region reproduces its value exactly.
            let base = img.get(col[0].0, row[0].0);
            let mut acc = 0.0;
            for &(sy, ay) in row {
                for &(sx, ax) in col {
                    acc += (ax * ay) as f64 * (img.get(sx, sy) - base);
                }
            }
            data.push((base + acc / total).clamp(0.0, 1.0));
        }
    }
    GrayImage::new(out_w, out_h, data)
}

/// Downsamples a mask by area-weighted majority; exact ties become 0.
pub fn resize_mask_majority(mask: &BinaryMask, out_w: usize, out_h: usize) -> Result<BinaryMask> {
    check_downsample(mask.width(), mask.height(), out_w, out_h)?;
    let wx = axis_weights(mask.width(), out_w);
    let wy = axis_weights(mask.height(), out_h);
    let total = (mask.width() * mask.height()) as u64;
    let mut bits = Vec::with_capacity(out_w * out_h);
    for row in &wy {
        for col in &wx {
            let mut ones = 0u64;
            for &(sy, ay) in row {
                for &(sx, ax) in col {
                    if mask.get(sx, sy) {
                        ones += ax * ay;
                    }
                }
            }
            bits.push(u8::from(2 * ones > total));
        }
    }
    BinaryMask::new(out_w, out_h, bits)
}
