//! Statevector simulation of the warm-started variational segmentation
//! circuit.
//!
//! Variables are amplitude encoded: register state `|i>` carries pixel `i`
//! and one ancilla qubit carries its class, so `n` pixels need
//! `ceil(log2 n) + 1` qubits. Training minimizes the edge-sum loss with the
//! binary variables relaxed to the ancilla's conditional probabilities.

mod circuit;
mod model;
mod statevector;

pub use circuit::{apply_ansatz, Ansatz};
pub use model::{
    loss_history_csv, round_solution, solve_vqa, train, vqa_loss, warm_start_from_filter,
    TrainOutcome, VqaConfig, VqaModel, VqaRun,
};
pub use statevector::{
    plan_qubits, probabilities, warm_start_state, QubitPlan, Statevector, PROBABILITY_GUARD,
};
