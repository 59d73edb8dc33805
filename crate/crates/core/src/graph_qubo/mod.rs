//! Pixel similarity graph and the QUBO form of the smoothed min-cut loss.

mod format;
mod graph;
mod qubo;

pub use format::{parse_qubo, parse_qubo_json, serialize_qubo, serialize_qubo_json};
pub use graph::{build_graph, Edge, PixelGraph};
pub use qubo::{build_qubo, direct_loss, edge_loss, relaxed_loss, Adjacency, QuboProblem};
