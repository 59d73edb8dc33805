use std::time::Instant;

use super::SolverOutcome;
use crate::graph_qubo::QuboProblem;
use crate::{Error, Result};

pub const MAX_EXACT_VARIABLES: usize = 26;

/// Energies closer than this are treated as ties.
const TIE_TOLERANCE: f64 = 1e-9;

/// Global minimum by enumerating all `2^n` assignments.
///
/// Ties go to the lexicographically smallest bit string, variable 0 first.
/// Assignments are visited in Gray-code order with O(degree) energy
/// updates; the code word is kept with variable 0 in the most significant
/// bit so integer order equals lexicographic order.
pub fn solve_exact(q: &QuboProblem) -> Result<SolverOutcome> {
    let n = q.n;
    if n > MAX_EXACT_VARIABLES {
        return Err(Error::TooLarge {
            n,
            max: MAX_EXACT_VARIABLES,
        });
    }
    let start = Instant::now();
    let adj = q.adjacency();
    let mut x = vec![0u8; n];
    let mut energy = q.offset;
    let mut best_energy = energy;
    let mut best_code: u32 = 0;
    let mut code: u32 = 0;
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        let var = n - 1 - bit;
        energy += q.flip_delta(&adj, &x, var);
        x[var] ^= 1;
        code ^= 1 << bit;
        if energy < best_energy - TIE_TOLERANCE {
            best_energy = energy;
            best_code = code;
        } else if energy <= best_energy + TIE_TOLERANCE && code < best_code {
            best_code = code;
            best_energy = best_energy.min(energy);
        }
    }
    let best: Vec<u8> = (0..n)
        .map(|i| ((best_code >> (n - 1 - i)) & 1) as u8)
        .collect();
    let best_energy = q.energy_with(&adj, &best);
    Ok(SolverOutcome {
        best,
        best_energy,
        read_energies: vec![best_energy],
        elapsed: start.elapsed(),
        solver_name: "exact".into(),
        seed: None,
    })
}
