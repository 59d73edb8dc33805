use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SolverOutcome;
use crate::graph_qubo::{Adjacency, QuboProblem};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaConfig {
    pub beta_start: f64,
    pub beta_end: f64,
    pub sweeps: usize,
    pub reads: usize,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            beta_start: 0.1,
            beta_end: 4.2,
            sweeps: 1000,
            reads: 2000,
            seed: 0,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_start > 0.0 && self.beta_start <= self.beta_end && self.beta_end.is_finite())
        {
            return Err(Error::Config(format!(
                "need 0 < beta_start <= beta_end, got {} and {}",
                self.beta_start, self.beta_end
            )));
        }
        if self.sweeps == 0 || self.reads == 0 {
            return Err(Error::Config("sweeps and reads must be >= 1".into()));
        }
        Ok(())
    }
}

/// Metropolis rule: accept iff `u < min(1, exp(-delta_e * beta))`.
pub fn metropolis_accept(delta_e: f64, beta: f64, u: f64) -> bool {
    if delta_e <= 0.0 {
        return true;
    }
    u < (-delta_e * beta).exp().min(1.0)
}

/// Inverse temperature of sweep `sweep_index`, rising linearly from
/// `beta_start` on the first sweep to `beta_end` on the last.
pub fn beta_schedule(cfg: &SaConfig, sweep_index: usize) -> f64 {
    if cfg.sweeps <= 1 {
        return cfg.beta_end;
    }
    if sweep_index + 1 == cfg.sweeps {
        return cfg.beta_end;
    }
    cfg.beta_start + sweep_index as f64 * (cfg.beta_end - cfg.beta_start) / (cfg.sweeps - 1) as f64
}

fn read_rng(seed: u64, read: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(read as u64);
    rng
}

/// One annealing read; returns the lowest-energy state seen at sweep
/// boundaries.
fn anneal_once(q: &QuboProblem, adj: &Adjacency, cfg: &SaConfig, read: usize) -> (Vec<u8>, f64) {
    let n = q.n;
    let mut rng = read_rng(cfg.seed, read);
    let mut x: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
    let mut energy = q.energy_with(adj, &x);
    let mut best = x.clone();
    let mut best_energy = energy;
    let mut order: Vec<usize> = (0..n).collect();
    for sweep in 0..cfg.sweeps {
        let beta = beta_schedule(cfg, sweep);
        order.shuffle(&mut rng);
        for &i in &order {
            let delta = q.flip_delta(adj, &x, i);
            let u: f64 = rng.gen();
            if metropolis_accept(delta, beta, u) {
                x[i] ^= 1;
                energy += delta;
            }
        }
        if energy < best_energy {
            best_energy = energy;
            best.copy_from_slice(&x);
        }
    }
    let exact = q.energy_with(adj, &best);
    (best, exact)
}

/// Simulated annealing over `cfg.reads` independent reads.
///
/// Read `r` draws from its own ChaCha stream `r` under `cfg.seed`, so the
/// result does not depend on how reads are scheduled across threads. The
/// best read is chosen by energy, then by read index.
pub fn solve_sa(q: &QuboProblem, cfg: &SaConfig) -> Result<SolverOutcome> {
    cfg.validate()?;
    if q.n == 0 {
        return Err(Error::InvalidData(
            "simulated annealing needs at least one variable".into(),
        ));
    }
    let start = Instant::now();
    let adj = q.adjacency();
    let reads: Vec<(Vec<u8>, f64)> = (0..cfg.reads)
        .into_par_iter()
        .map(|r| anneal_once(q, &adj, cfg, r))
        .collect();
    let (best_idx, _) = reads
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(a.0.cmp(&b.0)))
        .expect("at least one read");
    let read_energies: Vec<f64> = reads.iter().map(|r| r.1).collect();
    Ok(SolverOutcome {
        best: reads[best_idx].0.clone(),
        best_energy: reads[best_idx].1,
        read_energies,
        elapsed: start.elapsed(),
        solver_name: "sa".into(),
        seed: Some(cfg.seed),
    })
}
