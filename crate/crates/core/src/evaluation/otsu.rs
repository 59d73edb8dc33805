use crate::imaging::{BinaryMask, GrayImage};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OtsuResult {
    pub threshold: f64,
    pub mask: BinaryMask,
}

/// Index of the cell holding `v`, where cell `k` collects values in
/// `(k/bins, (k+1)/bins]` (cell 0 also holds 0). Computed against the same
/// boundaries the mask uses, so `bin(v) >= k` iff `v > k/bins`.
fn bin_of(v: f64, bins: usize) -> usize {
    let edge = |k: usize| k as f64 / bins as f64;
    let mut b = ((v * bins as f64).ceil() as isize - 1).clamp(0, bins as isize - 1) as usize;
    while b > 0 && !(v > edge(b)) {
        b -= 1;
    }
    while b + 1 < bins && v > edge(b + 1) {
        b += 1;
    }
    b
}

/// Otsu's method on a `bins`-cell histogram over `[0, 1]`.
///
/// Every interior cell boundary is tried and the one with the largest
/// between-class variance wins, lowest boundary on ties. Foreground is
/// `intensity > threshold`. When no boundary separates the pixels the
/// threshold is the maximum intensity and the mask is empty.
pub fn otsu_threshold(img: &GrayImage, bins: usize) -> Result<OtsuResult> {
    if img.is_empty() {
        return Err(Error::InvalidData(
            "Otsu threshold of an empty image".into(),
        ));
    }
    if bins < 2 {
        return Err(Error::Config(format!(
            "Otsu needs at least 2 bins, got {bins}"
        )));
    }
    let mut count = vec![0usize; bins];
    let mut sum = vec![0.0f64; bins];
    for &v in img.data() {
        let b = bin_of(v, bins);
        count[b] += 1;
        sum[b] += v;
    }
    let total = img.len() as f64;
    let total_sum: f64 = sum.iter().sum();

    let mut best: Option<(usize, f64)> = None;
    let (mut n0, mut s0) = (0usize, 0.0f64);
    for k in 1..bins {
        n0 += count[k - 1];
        s0 += sum[k - 1];
        let n1 = img.len() - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let w0 = n0 as f64 / total;
        let w1 = n1 as f64 / total;
        let mu0 = s0 / n0 as f64;
        let mu1 = (total_sum - s0) / n1 as f64;
        let between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if best.is_none_or(|(_, b)| between > b) {
            best = Some((k, between));
        }
    }
    let threshold = match best {
        Some((k, _)) => k as f64 / bins as f64,
        None => img.data().iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    Ok(OtsuResult {
        threshold,
        mask: img.threshold(threshold),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over every split of the sorted intensities, minimizing
    /// the weighted within-class variance directly.
    fn oracle_split(values: &[f64]) -> f64 {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let var = |s: &[f64]| {
            let m = s.iter().sum::<f64>() / s.len() as f64;
            s.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
        };
        let mut best = (f64::INFINITY, 0.0);
        for cut in 1..v.len() {
            if v[cut - 1] == v[cut] {
                continue;
            }
            let within = var(&v[..cut]) + var(&v[cut..]);
            if within < best.0 {
                best = (within, v[cut - 1]);
            }
        }
        best.1
    }

    #[test]
    fn bin_edges_are_consistent() {
        for bins in [2, 3, 10, 256, 255] {
            for k in 0..=1000 {
                let v = k as f64 / 1000.0;
                let b = bin_of(v, bins);
                for edge in 1..bins {
                    assert_eq!(b >= edge, v > edge as f64 / bins as f64);
                }
            }
        }
    }

    #[test]
    fn separates_two_groups() {
        let data = [0.1, 0.9, 0.1, 0.9, 0.1, 0.9, 0.1, 0.9, 0.1, 0.9];
        let img = GrayImage::new(10, 1, data.to_vec()).unwrap();
        let r = otsu_threshold(&img, 256).unwrap();
        let truth: Vec<u8> = data.iter().map(|&v| u8::from(v > 0.5)).collect();
        assert_eq!(r.mask.bits(), truth.as_slice());
        let last_background = oracle_split(&data);
        assert!(r.threshold >= last_background && r.threshold < 0.9);
    }

    #[test]
    fn constant_image_is_background() {
        let img = GrayImage::filled(4, 4, 0.37).unwrap();
        let r = otsu_threshold(&img, 256).unwrap();
        assert_eq!(r.mask.area(), 0);
        assert_eq!(r.threshold, 0.37);
    }

    #[test]
    fn binary_image_keeps_classes() {
        let data = vec![0.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        let img = GrayImage::new(3, 2, data.clone()).unwrap();
        let r = otsu_threshold(&img, 256).unwrap();
        assert!(r.threshold > 0.0 && r.threshold < 1.0);
        assert_eq!(r.threshold, 1.0 / 256.0);
        let expect: Vec<u8> = data.iter().map(|&v| v as u8).collect();
        assert_eq!(r.mask.bits(), expect.as_slice());
    }

    #[test]
    fn matches_oracle_on_trimodal_data() {
        let data: Vec<f64> = (0..60)
            .map(|k| match k % 3 {
                0 => 0.1 + 0.001 * (k % 7) as f64,
                1 => 0.45 + 0.002 * (k % 5) as f64,
                _ => 0.85 + 0.001 * (k % 4) as f64,
            })
            .collect();
        let img = GrayImage::new(60, 1, data.clone()).unwrap();
        let r = otsu_threshold(&img, 256).unwrap();
        let cut = oracle_split(&data);
        let oracle: Vec<u8> = data.iter().map(|&v| u8::from(v > cut)).collect();
        assert_eq!(r.mask.bits(), oracle.as_slice());
    }

    #[test]
    fn shift_moves_threshold_up() {
        let data: Vec<f64> = (0..40)
            .map(|k| if k < 25 { 0.2 } else { 0.6 } + 0.003 * (k % 5) as f64)
            .collect();
        let img = GrayImage::new(40, 1, data.clone()).unwrap();
        let base = otsu_threshold(&img, 256).unwrap();
        let same = otsu_threshold(
            &GrayImage::new(40, 1, data.iter().map(|v| v * 1.0).collect()).unwrap(),
            256,
        )
        .unwrap();
        assert_eq!(base, same);
        let shifted = GrayImage::new(40, 1, data.iter().map(|v| v + 0.1).collect()).unwrap();
        let r = otsu_threshold(&shifted, 256).unwrap();
        assert!(r.threshold >= base.threshold);
        assert_eq!(r.mask, base.mask);
    }

    #[test]
    fn errors() {
        assert!(otsu_threshold(&GrayImage::new(0, 0, vec![]).unwrap(), 256).is_err());
        assert!(otsu_threshold(&GrayImage::filled(1, 1, 0.0).unwrap(), 1).is_err());
    }
}
