use std::collections::BTreeMap;

use super::PixelGraph;
use crate::{Error, Result};

/// `x^T Q x + c^T x + offset` over binary `x`, with `Q` stored as its
/// diagonal plus the strict upper triangle (each off-diagonal pair counted
/// once).
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    pub n: usize,
    pub linear: Vec<f64>,
    pub diagonal: Vec<f64>,
    /// Keys satisfy `i < j < n`.
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
    /// Smoothness weight the problem was built with; informational.
    pub alpha: f64,
}

/// Per-variable neighbour lists of the off-diagonal couplings.
#[derive(Debug, Clone)]
pub struct Adjacency {
    start: Vec<usize>,
    entries: Vec<(usize, f64)>,
}

impl Adjacency {
    pub fn neighbours(&self, i: usize) -> &[(usize, f64)] {
        &self.entries[self.start[i]..self.start[i + 1]]
    }
}

impl QuboProblem {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            linear: vec![0.0; n],
            diagonal: vec![0.0; n],
            quadratic: BTreeMap::new(),
            offset: 0.0,
            alpha: 0.0,
        }
    }

    /// Adds `coef` to the coupling of `i` and `j` (either order; `i == j`
    /// targets the diagonal).
    pub fn add_quadratic(&mut self, i: usize, j: usize, coef: f64) {
        if i == j {
            self.diagonal[i] += coef;
        } else {
            *self.quadratic.entry((i.min(j), i.max(j))).or_insert(0.0) += coef;
        }
    }

    /// Every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            linear: self.linear.iter().map(|c| c * factor).collect(),
            diagonal: self.diagonal.iter().map(|c| c * factor).collect(),
            quadratic: self
                .quadratic
                .iter()
                .map(|(k, v)| (*k, v * factor))
                .collect(),
            offset: self.offset * factor,
            alpha: self.alpha,
        }
    }

    pub fn adjacency(&self) -> Adjacency {
        let mut count = vec![0usize; self.n + 1];
        for &(i, j) in self.quadratic.keys() {
            count[i + 1] += 1;
            count[j + 1] += 1;
        }
        for k in 0..self.n {
            count[k + 1] += count[k];
        }
        let mut fill = count.clone();
        let mut entries = vec![(0usize, 0.0f64); count[self.n]];
        for (&(i, j), &q) in &self.quadratic {
            entries[fill[i]] = (j, q);
            fill[i] += 1;
            entries[fill[j]] = (i, q);
            fill[j] += 1;
        }
        Adjacency {
            start: count,
            entries,
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: len,
            });
        }
        Ok(())
    }

    pub fn energy(&self, x: &[u8]) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(self.energy_with(&self.adjacency(), x))
    }

    /// Evaluates the energy node by node as
    /// `sum_i x_i (c_i + (Q_ii + sum_j x_j Q_ij / 2))`, accumulating each
    /// node's couplings in ascending neighbour order.
    pub fn energy_with(&self, adj: &Adjacency, x: &[u8]) -> f64 {
        let mut e = self.offset;
        for i in 0..self.n {
            if x[i] != 1 {
                continue;
            }
            let mut inner = self.diagonal[i];
            for &(j, q) in adj.neighbours(i) {
                if x[j] == 1 {
                    inner += 0.5 * q;
                }
            }
            e += self.linear[i] + inner;
        }
        e
    }

    /// Energy change from flipping bit `i` of `x`.
    pub fn flip_delta(&self, adj: &Adjacency, x: &[u8], i: usize) -> f64 {
        let mut field = self.linear[i] + self.diagonal[i];
        for &(j, q) in adj.neighbours(i) {
            if x[j] == 1 {
                field += q;
            }
        }
        if x[i] == 1 {
            -field
        } else {
            field
        }
    }
}

/// Coefficients of the smoothed min-cut loss:
/// `c_i = (2a+1) d_i`, `Q_ij = -2(1+a) W_ij`, `Q_ii = -a d_i` with `d_i`
/// the weighted degree.
///
/// `c_i` is computed as `-(Q_ii + sum_j Q_ij / 2)` in the same order that
/// [`QuboProblem::energy_with`] uses, so both uniform assignments evaluate
/// to exactly zero.
pub fn build_qubo(g: &PixelGraph, alpha: f64) -> QuboProblem {
    let n = g.num_nodes();
    let degrees = g.degrees();
    let mut q = QuboProblem::empty(n);
    q.alpha = alpha;
    for (i, d) in degrees.iter().enumerate() {
        q.diagonal[i] = -alpha * d;
    }
    for e in &g.edges {
        q.add_quadratic(e.i, e.j, -2.0 * (1.0 + alpha) * e.weight);
    }
    let adj = q.adjacency();
    for i in 0..n {
        let mut inner = q.diagonal[i];
        for &(_, coef) in adj.neighbours(i) {
            inner += 0.5 * coef;
        }
        q.linear[i] = -inner;
    }
    q
}

/// Per-edge loss `W[(a + b - 2ab) + alpha (1 - (a + b - 1)^2)]`, valid for
/// binary and relaxed values.
pub fn edge_loss(a: f64, b: f64, weight: f64, alpha: f64) -> f64 {
    let s = a + b - 1.0;
    weight * ((a + b - 2.0 * a * b) + alpha * (1.0 - s * s))
}

/// Edge-sum loss evaluated on values in `[0, 1]`.
pub fn relaxed_loss(g: &PixelGraph, alpha: f64, values: &[f64]) -> Result<f64> {
    if values.len() != g.num_nodes() {
        return Err(Error::Dimension {
            expected: g.num_nodes(),
            actual: values.len(),
        });
    }
    Ok(g.edges
        .iter()
        .map(|e| edge_loss(values[e.i], values[e.j], e.weight, alpha))
        .sum())
}

/// Edge-sum loss evaluated literally on a binary assignment.
pub fn direct_loss(g: &PixelGraph, alpha: f64, x: &[u8]) -> Result<f64> {
    let values: Vec<f64> = x.iter().map(|&b| f64::from(b)).collect();
    relaxed_loss(g, alpha, &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_qubo::{build_graph, Edge};
    use crate::imaging::GrayImage;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single_edge(w: f64) -> PixelGraph {
        PixelGraph {
            width: 2,
            height: 1,
            edges: vec![Edge {
                i: 0,
                j: 1,
                weight: w,
            }],
            sigma_hat: 0.0,
        }
    }

    #[test]
    fn single_edge_coefficients() {
        let q = build_qubo(&single_edge(1.0), 0.1);
        assert_abs_diff_eq!(q.linear[0], 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(q.linear[1], 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(q.quadratic[&(0, 1)], -2.2, epsilon = 1e-15);
        assert_abs_diff_eq!(q.diagonal[0], -0.1, epsilon = 1e-15);
        assert_eq!(q.offset, 0.0);

        let q = build_qubo(&single_edge(0.7), 0.0);
        assert_eq!(q.linear, vec![0.7, 0.7]);
        assert_eq!(q.quadratic[&(0, 1)], -1.4);
        assert!(q.diagonal.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn isolated_variable_has_zero_terms() {
        let g = build_graph(&GrayImage::filled(1, 1, 0.5).unwrap(), 0.5);
        let q = build_qubo(&g, 0.1);
        assert_eq!(q.linear, vec![0.0]);
        assert_eq!(q.diagonal, vec![-0.0]);
        assert!(q.quadratic.is_empty());
    }

    #[test]
    fn single_edge_energies() {
        let q = build_qubo(&single_edge(1.0), 0.1);
        assert_eq!(q.energy(&[0, 0]).unwrap(), 0.0);
        assert_abs_diff_eq!(q.energy(&[1, 0]).unwrap(), 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(q.energy(&[1, 1]).unwrap(), 0.0, epsilon = 1e-12);
        assert!(matches!(q.energy(&[1]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn direct_loss_examples() {
        let g = single_edge(0.8);
        assert_eq!(direct_loss(&g, 0.1, &[0, 0]).unwrap(), 0.0);
        assert_eq!(direct_loss(&g, 0.1, &[1, 1]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            direct_loss(&g, 0.1, &[0, 1]).unwrap(),
            1.1 * 0.8,
            epsilon = 1e-15
        );
        assert!(direct_loss(&g, 0.1, &[0]).is_err());
    }

    #[test]
    fn direct_loss_matches_energy_on_random_3x3() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data: Vec<f64> = (0..9).map(|_| rng.gen()).collect();
        let g = build_graph(&GrayImage::new(3, 3, data).unwrap(), 0.5);
        let q = build_qubo(&g, 0.1);
        for _ in 0..50 {
            let x: Vec<u8> = (0..9).map(|_| rng.gen_range(0..2)).collect();
            let d = direct_loss(&g, 0.1, &x).unwrap();
            assert!((d - q.energy(&x).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn flip_delta_matches_energy_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<f64> = (0..12).map(|_| rng.gen()).collect();
        let q = build_qubo(&build_graph(&GrayImage::new(4, 3, data).unwrap(), 0.5), 0.3);
        let adj = q.adjacency();
        let mut x: Vec<u8> = (0..12).map(|_| rng.gen_range(0..2)).collect();
        for i in 0..12 {
            let before = q.energy(&x).unwrap();
            let d = q.flip_delta(&adj, &x, i);
            x[i] ^= 1;
            assert_abs_diff_eq!(q.energy(&x).unwrap() - before, d, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn built_energy_is_scaled_cut(
            data in proptest::collection::vec(0.0f64..=1.0, 12),
            bits in proptest::collection::vec(0u8..2, 12),
            alpha in 0.0f64..100.0,
        ) {
            let g = build_graph(&GrayImage::new(4, 3, data).unwrap(), 0.5);
            let q = build_qubo(&g, alpha);
            let cut: f64 = g.edges.iter().filter(|e| bits[e.i] != bits[e.j]).map(|e| e.weight).sum();
            let e = q.energy(&bits).unwrap();
            prop_assert!(e >= -1e-9);
            prop_assert!((e - (1.0 + alpha) * cut).abs() <= 1e-9 * (1.0 + alpha));
            prop_assert_eq!(q.energy(&[0; 12]).unwrap(), 0.0);
            prop_assert_eq!(q.energy(&[1; 12]).unwrap(), 0.0);
            for i in 0..12 {
                let expected = (2.0 * alpha + 1.0) * g.degrees()[i];
                prop_assert!((q.linear[i] - expected).abs() <= 1e-12 * (1.0 + expected));
            }
        }
    }
}
