use std::time::Duration;

use serde::Serialize;

/// Result of one solver invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverOutcome {
    pub best: Vec<u8>,
    pub best_energy: f64,
    /// Energy reported by each read, in read order.
    pub read_energies: Vec<f64>,
    #[serde(serialize_with = "ser_secs")]
    pub elapsed: Duration,
    pub solver_name: String,
    pub seed: Option<u64>,
}

fn ser_secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl SolverOutcome {
    /// Running minimum of the read energies.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.read_energies
            .iter()
            .scan(f64::INFINITY, |best, &e| {
                *best = best.min(e);
                Some(*best)
            })
            .collect()
    }

    /// True when every field other than the wall-clock time matches.
    pub fn same_result(&self, other: &Self) -> bool {
        self.best == other.best
            && self.best_energy.to_bits() == other.best_energy.to_bits()
            && self.read_energies.len() == other.read_energies.len()
            && self
                .read_energies
                .iter()
                .zip(&other.read_energies)
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && self.solver_name == other.solver_name
            && self.seed == other.seed
    }
}
