//! Unsupervised image segmentation through a quantum-inspired filter and a
//! graph-cut QUBO, with exact, annealing and variational solvers.
//!
//! The pipeline is:
//!
//! 1. [`imaging`]: load or synthesize a grayscale image and downsample it.
//! 2. [`qfilter`]: apply the quantum-inspired multilevel transformation.
//! 3. [`graph_qubo`]: build the 4-neighbour similarity graph and its QUBO.
//! 4. [`annealing`] / [`vqa`]: minimize the QUBO.
//! 5. [`evaluation`]: score masks with Dice/IoU, compare with Otsu.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod annealing;
pub mod error;
pub mod evaluation;
pub mod graph_qubo;
pub mod imaging;
pub mod qfilter;
pub mod seed;
pub mod vqa;

pub use error::{Error, Result};
pub use graph_qubo::{PixelGraph, QuboProblem};
pub use imaging::{BinaryMask, GrayImage};
