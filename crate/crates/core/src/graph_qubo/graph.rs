use serde::Serialize;

use crate::imaging::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// 4-connected grid graph over row-major pixel indices with Gaussian
/// similarity weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PixelGraph {
    pub width: usize,
    pub height: usize,
    /// Each neighbour pair once, `i < j`, ordered by `i` then right before down.
    pub edges: Vec<Edge>,
    pub sigma_hat: f64,
}

impl PixelGraph {
    pub fn num_nodes(&self) -> usize {
        self.width * self.height
    }

    /// Sum of incident edge weights per node.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.num_nodes()];
        for e in &self.edges {
            d[e.i] += e.weight;
            d[e.j] += e.weight;
        }
        d
    }
}

fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Builds the grid graph of `z` with bandwidth `bandwidth_factor * std(z)`.
/// A zero bandwidth (constant image) gives weight 1 to equal neighbours
/// and 0 otherwise.
pub fn build_graph(z: &GrayImage, bandwidth_factor: f64) -> PixelGraph {
    let (w, h) = (z.width(), z.height());
    let sigma_hat = if z.is_empty() {
        0.0
    } else {
        bandwidth_factor * population_std(z.data())
    };
    let weight = |a: f64, b: f64| {
        if sigma_hat > 0.0 {
            (-(a - b) * (a - b) / (2.0 * sigma_hat * sigma_hat)).exp()
        } else if a == b {
            1.0
        } else {
            0.0
        }
    };
    let mut edges = Vec::with_capacity(2 * w * h);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                edges.push(Edge {
                    i,
                    j: i + 1,
                    weight: weight(z.get(x, y), z.get(x + 1, y)),
                });
            }
            if y + 1 < h {
                edges.push(Edge {
                    i,
                    j: i + w,
                    weight: weight(z.get(x, y), z.get(x, y + 1)),
                });
            }
        }
    }
    PixelGraph {
        width: w,
        height: h,
        edges,
        sigma_hat,
    }
}
