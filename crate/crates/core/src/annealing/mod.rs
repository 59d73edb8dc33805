//! Binary QUBO solvers.
//!
//! * [`solve_exact`]: exhaustive enumeration, the reference optimum.
//! * [`solve_sa`]: single-flip Metropolis simulated annealing with a linear
//!   inverse-temperature schedule.
//! * [`export_for_sampler`] / [`import_samples`]: hand-off to an external
//!   annealer through files.

mod exact;
mod outcome;
mod sa;
mod sampler;

pub use exact::{solve_exact, MAX_EXACT_VARIABLES};
pub use outcome::SolverOutcome;
pub use sa::{beta_schedule, metropolis_accept, solve_sa, SaConfig};
pub use sampler::{
    export_for_sampler, format_samples, import_samples, parse_samples, read_exported, ExactSampler,
    Sampler, SimulatedAnnealingSampler, SAMPLE_ENERGY_TOLERANCE,
};
