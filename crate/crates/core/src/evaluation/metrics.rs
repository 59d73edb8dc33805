use std::time::Duration;

use serde::{Serialize, Serializer};

use super::connected_components;
use crate::imaging::BinaryMask;
use crate::{Error, Result};

fn counts(m: &BinaryMask, m_hat: &BinaryMask) -> Result<(usize, usize, usize)> {
    if m.width() != m_hat.width() || m.height() != m_hat.height() {
        return Err(Error::Dimension {
            expected: m.len(),
            actual: m_hat.len(),
        });
    }
    let inter = m
        .bits()
        .iter()
        .zip(m_hat.bits())
        .filter(|(a, b)| **a == 1 && **b == 1)
        .count();
    Ok((m.area(), m_hat.area(), inter))
}

/// `2|M n M'| / (|M| + |M'|)`; two empty masks score 1.
pub fn dice(m: &BinaryMask, m_hat: &BinaryMask) -> Result<f64> {
    let (a, b, inter) = counts(m, m_hat)?;
    if a + b == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * inter as f64 / (a + b) as f64)
}

/// `|M n M'| / |M u M'|`; two empty masks score 1.
pub fn iou(m: &BinaryMask, m_hat: &BinaryMask) -> Result<f64> {
    let (a, b, inter) = counts(m, m_hat)?;
    let union = a + b - inter;
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

fn ser_secs<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// Per-run summary. Truth-dependent fields are omitted from JSON when no
/// ground truth was given; `elapsed` is in seconds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dice: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iou: Option<f64>,
    pub predicted_area: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_area: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intersection_area: Option<usize>,
    pub connected_components: usize,
    pub solver_name: String,
    #[serde(serialize_with = "ser_secs")]
    pub elapsed: Duration,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
}

impl SegmentationReport {
    pub fn new(
        predicted: &BinaryMask,
        truth: Option<&BinaryMask>,
        solver_name: &str,
        elapsed: Duration,
        energy: Option<f64>,
    ) -> Result<Self> {
        let mut report = Self {
            dice: None,
            iou: None,
            predicted_area: predicted.area(),
            true_area: None,
            intersection_area: None,
            connected_components: connected_components(predicted),
            solver_name: solver_name.to_string(),
            elapsed,
            energy,
        };
        if let Some(t) = truth {
            let (ta, _, inter) = counts(t, predicted)?;
            report.dice = Some(dice(t, predicted)?);
            report.iou = Some(iou(t, predicted)?);
            report.true_area = Some(ta);
            report.intersection_area = Some(inter);
        }
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mask(bits: &[u8]) -> BinaryMask {
        BinaryMask::new(bits.len(), 1, bits.to_vec()).unwrap()
    }

    #[test]
    fn dice_examples() {
        let a = mask(&[1, 1, 0, 0]);
        assert_eq!(dice(&a, &a).unwrap(), 1.0);
        assert_eq!(dice(&a, &mask(&[0, 0, 1, 1])).unwrap(), 0.0);
        assert_eq!(dice(&a, &mask(&[0, 1, 1, 0])).unwrap(), 0.5);
        assert_eq!(dice(&mask(&[0, 0]), &mask(&[0, 0])).unwrap(), 1.0);
    }

    #[test]
    fn iou_examples() {
        let a = mask(&[1, 1, 0, 0]);
        assert_eq!(iou(&a, &a).unwrap(), 1.0);
        assert!((iou(&a, &mask(&[0, 1, 1, 0])).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(iou(&a, &mask(&[0, 0, 1, 1])).unwrap(), 0.0);
        assert_eq!(iou(&mask(&[0]), &mask(&[0])).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_dimensions() {
        let a = BinaryMask::zeros(2, 2);
        let b = BinaryMask::zeros(4, 1);
        assert!(dice(&a, &b).is_err());
        assert!(iou(&a, &b).is_err());
    }

    #[test]
    fn report_fields() {
        let truth = BinaryMask::new(3, 1, vec![1, 1, 0]).unwrap();
        let pred = BinaryMask::new(3, 1, vec![0, 1, 1]).unwrap();
        let r =
            SegmentationReport::new(&pred, Some(&truth), "otsu", Duration::from_millis(5), None)
                .unwrap();
        assert_eq!(r.intersection_area, Some(1));
        assert_eq!(r.connected_components, 1);
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in [
            "dice",
            "iou",
            "predicted_area",
            "true_area",
            "intersection_area",
            "connected_components",
            "solver_name",
            "elapsed",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
        let r = SegmentationReport::new(&pred, None, "sa", Duration::ZERO, Some(0.0)).unwrap();
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(json.get("dice").is_none());
        assert_eq!(json["energy"], 0.0);
    }

    proptest! {
        #[test]
        fn symmetric_and_related(
            a in proptest::collection::vec(0u8..2, 16),
            b in proptest::collection::vec(0u8..2, 16),
        ) {
            let (ma, mb) = (mask(&a), mask(&b));
            let d = dice(&ma, &mb).unwrap();
            let j = iou(&ma, &mb).unwrap();
            prop_assert_eq!(d, dice(&mb, &ma).unwrap());
            prop_assert_eq!(j, iou(&mb, &ma).unwrap());
            prop_assert!(j <= d);
            if ma.area() + mb.area() > 0 {
                prop_assert!((d - 2.0 * j / (1.0 + j)).abs() <= 1e-12);
            }
        }
    }
}
