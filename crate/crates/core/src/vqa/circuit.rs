//! Hardware-efficient ansatz and its adjoint-mode gradient.
//!
//! One layer is `R_y` on every qubit, a CNOT ladder `q -> q+1` in ascending
//! order, a second `R_y` on every qubit, then the same ladder in descending
//! order. With all angles zero the two ladders cancel and the layer is the
//! identity.

use super::statevector::{cnot, rotate_pairs, Statevector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Gate {
    Ry { qubit: usize, param: usize },
    Cnot { control: usize, target: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    num_qubits: usize,
    layers: usize,
    gates: Vec<Gate>,
}

impl Ansatz {
    pub fn new(num_qubits: usize, layers: usize) -> Self {
        let mut gates = Vec::new();
        let mut param = 0;
        for _ in 0..layers {
            for qubit in 0..num_qubits {
                gates.push(Gate::Ry { qubit, param });
                param += 1;
            }
            for q in 0..num_qubits.saturating_sub(1) {
                gates.push(Gate::Cnot {
                    control: q,
                    target: q + 1,
                });
            }
            for qubit in 0..num_qubits {
                gates.push(Gate::Ry { qubit, param });
                param += 1;
            }
            for q in (0..num_qubits.saturating_sub(1)).rev() {
                gates.push(Gate::Cnot {
                    control: q,
                    target: q + 1,
                });
            }
        }
        Self {
            num_qubits,
            layers,
            gates,
        }
    }

    pub fn num_params(&self) -> usize {
        2 * self.num_qubits * self.layers
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    fn check(&self, state: &Statevector, theta: &[f64]) -> Result<()> {
        if theta.len() != self.num_params() {
            return Err(Error::Dimension {
                expected: self.num_params(),
                actual: theta.len(),
            });
        }
        if state.num_qubits() != self.num_qubits {
            return Err(Error::Dimension {
                expected: self.num_qubits,
                actual: state.num_qubits(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, state: &Statevector, theta: &[f64]) -> Result<Statevector> {
        self.check(state, theta)?;
        let mut out = state.clone();
        let amps = out.amplitudes_mut();
        for gate in &self.gates {
            match *gate {
                Gate::Ry { qubit, param } => {
                    let (s, c) = (0.5 * theta[param]).sin_cos();
                    rotate_pairs(amps, qubit, c, s);
                }
                Gate::Cnot { control, target } => cnot(amps, control, target),
            }
        }
        Ok(out)
    }

    /// Gradient of a scalar `f(psi(theta))` given the final state and
    /// `df/dpsi` at that state, by walking the circuit backwards.
    pub fn backpropagate(
        &self,
        final_state: &Statevector,
        theta: &[f64],
        d_state: &[f64],
    ) -> Result<Vec<f64>> {
        self.check(final_state, theta)?;
        if d_state.len() != final_state.amplitudes().len() {
            return Err(Error::Dimension {
                expected: final_state.amplitudes().len(),
                actual: d_state.len(),
            });
        }
        let mut psi = final_state.amplitudes().to_vec();
        let mut lam = d_state.to_vec();
        let mut grad = vec![0.0; self.num_params()];
        for gate in self.gates.iter().rev() {
            match *gate {
                Gate::Ry { qubit, param } => {
                    let (s, c) = (0.5 * theta[param]).sin_cos();
                    // Undo the rotation to recover the state entering the gate.
                    rotate_pairs(&mut psi, qubit, c, -s);
                    let stride = 1usize << qubit;
                    let mut g = 0.0;
                    for (pb, lb) in psi.chunks(2 * stride).zip(lam.chunks(2 * stride)) {
                        for k in 0..stride {
                            let (a0, a1) = (pb[k], pb[k + stride]);
                            let d0 = 0.5 * (-s * a0 - c * a1);
                            let d1 = 0.5 * (c * a0 - s * a1);
                            g += lb[k] * d0 + lb[k + stride] * d1;
                        }
                    }
                    grad[param] += g;
                    rotate_pairs(&mut lam, qubit, c, -s);
                }
                Gate::Cnot { control, target } => {
                    cnot(&mut psi, control, target);
                    cnot(&mut lam, control, target);
                }
            }
        }
        Ok(grad)
    }
}

/// Applies a hardware-efficient ansatz whose depth is inferred from
/// `theta.len() = 2 * num_qubits * layers`.
pub fn apply_ansatz(state: &Statevector, theta: &[f64]) -> Result<Statevector> {
    let per_layer = 2 * state.num_qubits();
    if !theta.len().is_multiple_of(per_layer) {
        return Err(Error::Dimension {
            expected: per_layer * (theta.len() / per_layer + 1),
            actual: theta.len(),
        });
    }
    Ansatz::new(state.num_qubits(), theta.len() / per_layer).apply(state, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vqa::warm_start_state;
    use proptest::prelude::*;

    #[test]
    fn zero_angles_are_identity() {
        let x = [1, 0, 0, 1, 1, 0, 1, 0];
        let s = warm_start_state(&x, 8).unwrap();
        let out = apply_ansatz(&s, &[0.0; 2 * 4 * 3]).unwrap();
        for (a, b) in s.amplitudes().iter().zip(out.amplitudes()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn single_qubit_layer_is_two_rotations() {
        let s = Statevector::zero_state(1);
        let out = apply_ansatz(&s, &[std::f64::consts::PI, 0.0]).unwrap();
        assert!(out.amplitudes()[0].abs() < 1e-15);
        assert!((out.amplitudes()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wrong_parameter_count() {
        let s = Statevector::zero_state(3);
        assert!(matches!(
            apply_ansatz(&s, &[0.0; 5]),
            Err(Error::Dimension { .. })
        ));
        let a = Ansatz::new(3, 2);
        assert!(a.apply(&s, &[0.0; 6]).is_err());
        assert_eq!(a.num_params(), 12);
    }

    #[test]
    fn backprop_matches_finite_differences_of_linear_functional() {
        // f(psi) = <w, psi> has df/dpsi = w.
        let s = warm_start_state(&[0, 1, 1, 0], 4).unwrap();
        let a = Ansatz::new(3, 2);
        let theta: Vec<f64> = (0..12).map(|k| 0.3 * k as f64 - 1.1).collect();
        let w: Vec<f64> = (0..8).map(|k| (k as f64 * 0.7).sin()).collect();
        let f = |t: &[f64]| -> f64 {
            let out = a.apply(&s, t).unwrap();
            out.amplitudes().iter().zip(&w).map(|(p, q)| p * q).sum()
        };
        let out = a.apply(&s, &theta).unwrap();
        let grad = a.backpropagate(&out, &theta, &w).unwrap();
        for k in 0..12 {
            let mut tp = theta.clone();
            let mut tm = theta.clone();
            tp[k] += 1e-6;
            tm[k] -= 1e-6;
            let fd = (f(&tp) - f(&tm)) / 2e-6;
            assert!(
                (fd - grad[k]).abs() < 1e-8,
                "param {k}: {fd} vs {}",
                grad[k]
            );
        }
    }

    proptest! {
        #[test]
        fn norm_is_preserved(theta in proptest::collection::vec(-6.3f64..6.3, 16)) {
            let s = warm_start_state(&[1, 0, 1, 1, 0, 0, 0, 1], 8).unwrap();
            let out = apply_ansatz(&s, &theta).unwrap();
            prop_assert!((out.norm_squared() - 1.0).abs() <= 1e-12);
        }
    }
}
