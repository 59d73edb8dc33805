//! Overlap metrics, Otsu thresholding, class orientation and mask structure.

mod components;
mod metrics;
mod otsu;
mod polarity;

pub use components::connected_components;
pub use metrics::{dice, iou, SegmentationReport};
pub use otsu::{otsu_threshold, OtsuResult};
pub use polarity::orient_bright_foreground;
