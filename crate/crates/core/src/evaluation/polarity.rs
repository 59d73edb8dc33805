use crate::imaging::{BinaryMask, GrayImage};
use crate::{Error, Result};

/// Relabels a two-class partition so that class 1 is the class with the
/// higher mean intensity in `reference`. A partition with an empty class
/// is returned unchanged. Returns the mask and whether it was flipped.
///
/// Cut-based losses score `x` and `1 - x` identically, so which class a
/// solver labels 1 carries no meaning on its own.
pub fn orient_bright_foreground(
    mask: &BinaryMask,
    reference: &GrayImage,
) -> Result<(BinaryMask, bool)> {
    if mask.width() != reference.width() || mask.height() != reference.height() {
        return Err(Error::Dimension {
            expected: reference.len(),
            actual: mask.len(),
        });
    }
    let (mut s1, mut n1, mut s0, mut n0) = (0.0, 0usize, 0.0, 0usize);
    for (&b, &v) in mask.bits().iter().zip(reference.data()) {
        if b == 1 {
            s1 += v;
            n1 += 1;
        } else {
            s0 += v;
            n0 += 1;
        }
    }
    if n0 == 0 || n1 == 0 {
        return Ok((mask.clone(), false));
    }
    if s0 / n0 as f64 > s1 / n1 as f64 {
        Ok((mask.invert(), true))
    } else {
        Ok((mask.clone(), false))
    }
}
