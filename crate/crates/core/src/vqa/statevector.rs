use crate::{Error, Result};

/// Register layout for an amplitude-encoded problem: one basis state of the
/// register per variable plus one ancilla qubit on top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitPlan {
    pub register_qubits: usize,
    pub total_qubits: usize,
    pub padded_size: usize,
}

pub fn plan_qubits(n_vars: usize) -> Result<QubitPlan> {
    if n_vars == 0 {
        return Err(Error::InvalidData("need at least one variable".into()));
    }
    let padded_size = n_vars.next_power_of_two();
    let register_qubits = padded_size.trailing_zeros() as usize;
    Ok(QubitPlan {
        register_qubits,
        total_qubits: register_qubits + 1,
        padded_size,
    })
}

/// Statevector with real amplitudes. The warm-start preparation, `R_y` and
/// `CNOT` all have real matrices, so imaginary parts stay identically zero.
///
/// Qubit `q` is bit `q` of the basis index; the ancilla is the most
/// significant qubit, so amplitude `a * padded_size + i` belongs to
/// `|a>_ancilla |i>_register`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<f64>,
}

impl Statevector {
    pub fn zero_state(num_qubits: usize) -> Self {
        let mut amps = vec![0.0; 1 << num_qubits];
        amps[0] = 1.0;
        Self { num_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<f64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidData(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [f64] {
        &mut self.amps
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }

    /// `R_y(theta) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]` on `qubit`.
    pub fn apply_ry(&mut self, qubit: usize, theta: f64) {
        let (s, c) = (0.5 * theta).sin_cos();
        rotate_pairs(&mut self.amps, qubit, c, s);
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        cnot(&mut self.amps, control, target);
    }
}

/// Applies `[[c, -s], [s, c]]` to every amplitude pair differing in `qubit`.
pub(crate) fn rotate_pairs(amps: &mut [f64], qubit: usize, c: f64, s: f64) {
    let stride = 1usize << qubit;
    for block in amps.chunks_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x0, x1) = (*a0, *a1);
            *a0 = c * x0 - s * x1;
            *a1 = s * x0 + c * x1;
        }
    }
}

pub(crate) fn cnot(amps: &mut [f64], control: usize, target: usize) {
    let cmask = 1usize << control;
    let tmask = 1usize << target;
    for i in 0..amps.len() {
        if i & cmask != 0 && i & tmask == 0 {
            amps.swap(i, i | tmask);
        }
    }
}

/// `|psi_0> = P^{-1/2} sum_i |x*_i>_a |i>_r` for a warm-start assignment of
/// length `padded_size`.
pub fn warm_start_state(x_star: &[u8], padded_size: usize) -> Result<Statevector> {
    if x_star.len() != padded_size || !padded_size.is_power_of_two() {
        return Err(Error::Dimension {
            expected: padded_size,
            actual: x_star.len(),
        });
    }
    let amp = 1.0 / (padded_size as f64).sqrt();
    let mut amps = vec![0.0; 2 * padded_size];
    for (i, &bit) in x_star.iter().enumerate() {
        amps[usize::from(bit) * padded_size + i] = amp;
    }
    Statevector::from_amplitudes(amps)
}

/// Conditional probability of ancilla 1 for each of the first `n_vars`
/// register states; register states with (near) zero weight report 0.
pub fn probabilities(state: &Statevector, n_vars: usize) -> Vec<f64> {
    let half = state.amps.len() / 2;
    (0..n_vars.min(half))
        .map(|i| {
            let p0 = state.amps[i] * state.amps[i];
            let p1 = state.amps[half + i] * state.amps[half + i];
            let den = p0 + p1;
            if den < PROBABILITY_GUARD {
                0.0
            } else {
                p1 / den
            }
        })
        .collect()
}

/// Register weights below this are treated as unreachable.
pub const PROBABILITY_GUARD: f64 = 1e-15;
