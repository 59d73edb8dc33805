//! PGM (P2 ASCII / P5 binary) reading and writing.

use super::{BinaryMask, GrayImage};
use crate::{Error, Result};

fn format_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Format {
        offset,
        message: message.into(),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    /// Reads an unsigned decimal token, erroring with `what` on failure.
    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if start >= self.bytes.len() {
                format_err(start, format!("malformed header: missing {what}"))
            } else {
                format_err(start, format!("malformed header: expected {what}"))
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format_err(start, format!("malformed header: {what} out of range")))
    }
}

/// Decodes a P2 or P5 graymap into normalized intensities.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || bytes[0] != b'P' || !matches!(bytes[1], b'2' | b'5') {
        return Err(format_err(0, "malformed header: expected magic P2 or P5"));
    }
    let binary = bytes[1] == b'5';
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    cur.skip_space_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(format_err(
            maxval_at,
            format!("maxval {maxval} not in 1..=65535"),
        ));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| format_err(2, "malformed header: image too large"))?;
    let scale = maxval as f64;
    let mut data = Vec::with_capacity(count);

    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(format_err(
                cur.pos,
                "malformed header: missing raster separator",
            ));
        }
        let start = cur.pos + 1;
        let sample = if maxval > 255 { 2 } else { 1 };
        let need = count * sample;
        if bytes.len() - start < need {
            return Err(format_err(
                bytes.len(),
                format!(
                    "truncated payload: expected {need} bytes, found {}",
                    bytes.len() - start
                ),
            ));
        }
        for k in 0..count {
            let at = start + k * sample;
            let raw = if sample == 2 {
                u64::from(u16::from_be_bytes([bytes[at], bytes[at + 1]]))
            } else {
                u64::from(bytes[at])
            };
            if raw > maxval {
                return Err(format_err(
                    at,
                    format!("sample {raw} exceeds maxval {maxval}"),
                ));
            }
            data.push(raw as f64 / scale);
        }
    } else {
        for _ in 0..count {
            cur.skip_space_and_comments();
            if cur.pos >= bytes.len() {
                return Err(format_err(
                    cur.pos,
                    format!(
                        "truncated payload: expected {count} samples, found {}",
                        data.len()
                    ),
                ));
            }
            let at = cur.pos;
            let raw = cur.number("sample")?;
            if raw > maxval {
                return Err(format_err(
                    at,
                    format!("sample {raw} exceeds maxval {maxval}"),
                ));
            }
            data.push(raw as f64 / scale);
        }
    }
    GrayImage::new(width, height, data)
}

/// Encodes an image as binary PGM; `maxval` must be 255 or 65535.
pub fn save_pgm(img: &GrayImage, maxval: u32) -> Result<Vec<u8>> {
    if maxval != 255 && maxval != 65535 {
        return Err(Error::Unsupported(format!(
            "maxval {maxval}; use 255 or 65535"
        )));
    }
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    let scale = f64::from(maxval);
    for &v in img.data() {
        // f64::round is half-away-from-zero, which is half-up for v >= 0.
        let q = (v * scale).round() as u32;
        if maxval == 255 {
            out.push(q as u8);
        } else {
            out.extend_from_slice(&(q as u16).to_be_bytes());
        }
    }
    Ok(out)
}

/// Encodes a mask as an 8-bit PGM with pixel values `{0, 255}`.
pub fn save_mask_pgm(mask: &BinaryMask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width(), mask.height()).into_bytes();
    out.extend(mask.bits().iter().map(|&b| if b == 1 { 255u8 } else { 0 }));
    out
}
