use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::circuit::Ansatz;
use super::statevector::{
    plan_qubits, probabilities, warm_start_state, QubitPlan, Statevector, PROBABILITY_GUARD,
};
use crate::annealing::SolverOutcome;
use crate::graph_qubo::{build_qubo, relaxed_loss, PixelGraph, QuboProblem};
use crate::imaging::{BinaryMask, GrayImage};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VqaConfig {
    pub layers: usize,
    /// Filter intensity above which a pixel starts in class 1.
    pub threshold: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// Initial angles are drawn uniformly from `[-init_spread, init_spread]`;
    /// 0 starts exactly at the identity circuit.
    pub init_spread: f64,
    pub seed: u64,
}

impl Default for VqaConfig {
    fn default() -> Self {
        Self {
            layers: 2,
            threshold: 0.3,
            learning_rate: 0.01,
            epochs: 100,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            init_spread: 0.0,
            seed: 0,
        }
    }
}

impl VqaConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.layers == 0 {
            return fail("vqa layers must be >= 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return fail(format!(
                "vqa threshold must be in (0, 1), got {}",
                self.threshold
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!(
                "vqa learning rate must be > 0, got {}",
                self.learning_rate
            ));
        }
        if self.epochs == 0 {
            return fail("vqa epochs must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return fail("adam betas must be in [0, 1)".into());
        }
        if !(self.adam_eps > 0.0) || !(self.init_spread >= 0.0) {
            return fail("adam eps must be > 0 and init spread >= 0".into());
        }
        Ok(())
    }
}

/// Relaxed loss: the edge-sum loss with each `x_i` replaced by `b_i`.
pub fn vqa_loss(g: &PixelGraph, alpha: f64, b: &[f64]) -> Result<f64> {
    relaxed_loss(g, alpha, b)
}

/// `x_i = 1` iff `b_i > 0.5`.
pub fn round_solution(b: &[f64]) -> Vec<u8> {
    b.iter().map(|&p| u8::from(p > 0.5)).collect()
}

/// Thresholds a filtered image into the warm-start assignment.
pub fn warm_start_from_filter(z: &GrayImage, threshold: f64) -> Vec<u8> {
    z.threshold(threshold).bits().to_vec()
}

#[derive(Debug, Clone, Default, PartialEq)]
struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
}

/// Variational model over a pixel graph: problem data, ansatz angles,
/// warm start and optimizer state.
#[derive(Debug, Clone)]
pub struct VqaModel {
    pub graph: PixelGraph,
    pub alpha: f64,
    pub problem: QuboProblem,
    pub plan: QubitPlan,
    pub ansatz: Ansatz,
    pub theta: Vec<f64>,
    /// Length `padded_size`; padding entries are 0.
    pub warm_start: Vec<u8>,
    initial: Statevector,
    adam: AdamState,
}

impl VqaModel {
    pub fn new(graph: PixelGraph, alpha: f64, warm_start: &[u8], cfg: &VqaConfig) -> Result<Self> {
        cfg.validate()?;
        let n = graph.num_nodes();
        if warm_start.len() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: warm_start.len(),
            });
        }
        let plan = plan_qubits(n)?;
        let mut padded = warm_start.to_vec();
        padded.resize(plan.padded_size, 0);
        let initial = warm_start_state(&padded, plan.padded_size)?;
        let ansatz = Ansatz::new(plan.total_qubits, cfg.layers);
        let theta = if cfg.init_spread > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..ansatz.num_params())
                .map(|_| rng.gen_range(-cfg.init_spread..=cfg.init_spread))
                .collect()
        } else {
            vec![0.0; ansatz.num_params()]
        };
        let problem = build_qubo(&graph, alpha);
        Ok(Self {
            graph,
            alpha,
            problem,
            plan,
            ansatz,
            theta,
            warm_start: padded,
            initial,
            adam: AdamState::default(),
        })
    }

    pub fn n_vars(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn initial_state(&self) -> &Statevector {
        &self.initial
    }

    pub fn state(&self, theta: &[f64]) -> Result<Statevector> {
        self.ansatz.apply(&self.initial, theta)
    }

    pub fn probabilities_at(&self, theta: &[f64]) -> Result<Vec<f64>> {
        Ok(probabilities(&self.state(theta)?, self.n_vars()))
    }

    pub fn loss_at(&self, theta: &[f64]) -> Result<f64> {
        vqa_loss(&self.graph, self.alpha, &self.probabilities_at(theta)?)
    }

    pub fn loss(&self) -> Result<f64> {
        self.loss_at(&self.theta)
    }

    /// Loss and its exact gradient with respect to the angles.
    pub fn loss_and_gradient_at(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let state = self.state(theta)?;
        let n = self.n_vars();
        let b = probabilities(&state, n);
        let loss = vqa_loss(&self.graph, self.alpha, &b)?;

        // dL/db from the per-edge loss.
        let mut d_b = vec![0.0; n];
        for e in &self.graph.edges {
            let (bi, bj) = (b[e.i], b[e.j]);
            let s = bi + bj - 1.0;
            d_b[e.i] += e.weight * ((1.0 - 2.0 * bj) - 2.0 * self.alpha * s);
            d_b[e.j] += e.weight * ((1.0 - 2.0 * bi) - 2.0 * self.alpha * s);
        }

        // dL/dpsi through b_i = p1 / (p0 + p1).
        let amps = state.amplitudes();
        let half = amps.len() / 2;
        let mut d_state = vec![0.0; amps.len()];
        for i in 0..n {
            let (a0, a1) = (amps[i], amps[half + i]);
            let (p0, p1) = (a0 * a0, a1 * a1);
            let den = p0 + p1;
            if den < PROBABILITY_GUARD {
                continue;
            }
            let den2 = den * den;
            d_state[i] = d_b[i] * (-2.0 * a0 * p1 / den2);
            d_state[half + i] = d_b[i] * (2.0 * a1 * p0 / den2);
        }
        let grad = self.ansatz.backpropagate(&state, theta, &d_state)?;
        Ok((loss, grad))
    }

    pub fn loss_gradient(&self) -> Result<Vec<f64>> {
        Ok(self.loss_and_gradient_at(&self.theta)?.1)
    }

    /// Mask from the current angles.
    pub fn rounded(&self) -> Result<Vec<u8>> {
        Ok(round_solution(&self.probabilities_at(&self.theta)?))
    }

    fn adam_step(&mut self, grad: &[f64], cfg: &VqaConfig) {
        let k = self.theta.len();
        if self.adam.m.len() != k {
            self.adam = AdamState {
                m: vec![0.0; k],
                v: vec![0.0; k],
                step: 0,
            };
        }
        self.adam.step += 1;
        let t = self.adam.step as i32;
        let c1 = 1.0 - cfg.adam_beta1.powi(t);
        let c2 = 1.0 - cfg.adam_beta2.powi(t);
        for (p, &g) in grad.iter().enumerate() {
            self.adam.m[p] = cfg.adam_beta1 * self.adam.m[p] + (1.0 - cfg.adam_beta1) * g;
            self.adam.v[p] = cfg.adam_beta2 * self.adam.v[p] + (1.0 - cfg.adam_beta2) * g * g;
            let m_hat = self.adam.m[p] / c1;
            let v_hat = self.adam.v[p] / c2;
            self.theta[p] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.adam_eps);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Angles with the lowest loss seen, including the starting point.
    pub theta: Vec<f64>,
    pub final_loss: f64,
    /// Loss before each epoch's update, followed by the loss after the last
    /// update (`epochs + 1` entries).
    pub loss_history: Vec<f64>,
}

/// Full-gradient Adam for `cfg.epochs` steps. The model keeps the best
/// angles seen, so the returned loss never exceeds the starting loss.
pub fn train(model: &mut VqaModel, cfg: &VqaConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    let mut best_theta = model.theta.clone();
    let mut best_loss = f64::INFINITY;
    for epoch in 0..cfg.epochs {
        let (loss, grad) = model.loss_and_gradient_at(&model.theta)?;
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Training(format!(
                "non-finite loss {loss} or gradient at epoch {epoch} (|theta|_max = {})",
                model.theta.iter().fold(0.0f64, |m, t| m.max(t.abs()))
            )));
        }
        history.push(loss);
        if loss < best_loss {
            best_loss = loss;
            best_theta.clone_from(&model.theta);
        }
        model.adam_step(&grad, cfg);
    }
    let last = model.loss()?;
    if !last.is_finite() {
        return Err(Error::Training(format!(
            "non-finite loss {last} after the final epoch"
        )));
    }
    history.push(last);
    if last < best_loss {
        best_loss = last;
        best_theta.clone_from(&model.theta);
    }
    model.theta.clone_from(&best_theta);
    Ok(TrainOutcome {
        theta: best_theta,
        final_loss: best_loss,
        loss_history: history,
    })
}

/// Loss history as `epoch,loss` CSV.
pub fn loss_history_csv(history: &[f64]) -> String {
    let mut out = String::from("epoch,loss\n");
    for (k, l) in history.iter().enumerate() {
        out.push_str(&format!("{k},{l:.17e}\n"));
    }
    out
}

/// Result of the warm-started variational pipeline.
#[derive(Debug, Clone)]
pub struct VqaRun {
    pub mask: BinaryMask,
    pub warm_start: BinaryMask,
    pub outcome: SolverOutcome,
    pub training: TrainOutcome,
}

/// Warm start from the filtered image `z`, train, and round.
pub fn solve_vqa(z: &GrayImage, graph: &PixelGraph, alpha: f64, cfg: &VqaConfig) -> Result<VqaRun> {
    let start = Instant::now();
    let seed_mask = z.threshold(cfg.threshold);
    let mut model = VqaModel::new(graph.clone(), alpha, seed_mask.bits(), cfg)?;
    let training = train(&mut model, cfg)?;
    let bits = model.rounded()?;
    let energy = model.problem.energy(&bits)?;
    let mask = BinaryMask::new(z.width(), z.height(), bits.clone())?;
    Ok(VqaRun {
        mask,
        warm_start: seed_mask,
        outcome: SolverOutcome {
            best: bits,
            best_energy: energy,
            read_energies: vec![energy],
            elapsed: start.elapsed(),
            solver_name: "vqa".into(),
            seed: Some(cfg.seed),
        },
        training,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_qubo::{build_graph, Edge};
    use crate::vqa::apply_ansatz;
    use rand::Rng;

    fn single_edge() -> PixelGraph {
        PixelGraph {
            width: 2,
            height: 1,
            edges: vec![Edge {
                i: 0,
                j: 1,
                weight: 1.0,
            }],
            sigma_hat: 0.0,
        }
    }

    fn random_graph(w: usize, h: usize, seed: u64) -> PixelGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..w * h).map(|_| rng.gen()).collect();
        build_graph(&GrayImage::new(w, h, data).unwrap(), 0.5)
    }

    #[test]
    fn loss_examples() {
        let g = single_edge();
        assert_eq!(vqa_loss(&g, 0.1, &[0.0, 0.0]).unwrap(), 0.0);
        assert!((vqa_loss(&g, 0.1, &[0.5, 0.5]).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn rounding_is_strict() {
        assert_eq!(round_solution(&[0.7, 0.5, 0.2, 1.0]), vec![1, 0, 0, 1]);
    }

    #[test]
    fn identity_angles_reproduce_warm_start() {
        let g = random_graph(3, 2, 1);
        let x = vec![1, 0, 0, 1, 1, 0];
        let model = VqaModel::new(g, 0.1, &x, &VqaConfig::default()).unwrap();
        assert_eq!(model.plan.padded_size, 8);
        assert_eq!(&model.warm_start[6..], &[0, 0]);
        let state = apply_ansatz(model.initial_state(), &model.theta).unwrap();
        assert_eq!(round_solution(&probabilities(&state, 6)), x);
        assert_eq!(model.rounded().unwrap(), x);
    }

    #[test]
    fn first_adam_step_moves_by_learning_rate() {
        let g = random_graph(2, 2, 5);
        let cfg = VqaConfig {
            init_spread: 0.5,
            seed: 3,
            ..VqaConfig::default()
        };
        let mut model = VqaModel::new(g, 0.1, &[1, 0, 0, 1], &cfg).unwrap();
        let before = model.theta.clone();
        let grad = model.loss_gradient().unwrap();
        model.adam_step(&grad, &cfg);
        for k in 0..before.len() {
            let moved = model.theta[k] - before[k];
            if grad[k].abs() > 1e-6 {
                assert!((moved + cfg.learning_rate * grad[k].signum()).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn training_is_deterministic_and_never_worse() {
        let g = random_graph(2, 2, 9);
        let cfg = VqaConfig {
            init_spread: 0.3,
            seed: 11,
            epochs: 30,
            ..VqaConfig::default()
        };
        let run = |cfg: &VqaConfig| {
            let mut m = VqaModel::new(g.clone(), 0.1, &[1, 1, 0, 0], cfg).unwrap();
            train(&mut m, cfg).unwrap()
        };
        let a = run(&cfg);
        let b = run(&cfg);
        assert_eq!(a, b);
        assert_eq!(a.loss_history.len(), 31);
        assert!(a.final_loss <= a.loss_history[0]);
    }

    #[test]
    fn invalid_configs() {
        let g = single_edge();
        for cfg in [
            VqaConfig {
                epochs: 0,
                ..Default::default()
            },
            VqaConfig {
                layers: 0,
                ..Default::default()
            },
            VqaConfig {
                threshold: 1.0,
                ..Default::default()
            },
            VqaConfig {
                learning_rate: 0.0,
                ..Default::default()
            },
        ] {
            assert!(VqaModel::new(g.clone(), 0.1, &[0, 1], &cfg).is_err());
        }
        assert!(VqaModel::new(g, 0.1, &[0], &VqaConfig::default()).is_err());
    }

    #[test]
    fn history_csv_layout() {
        let csv = loss_history_csv(&[1.0, 0.5]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "epoch,loss");
        assert!(lines[2].starts_with("1,5.0"));
    }
}
