use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gate::Gate;
use super::statevector::Statevector;
use crate::error::{Error, Result};

/// An ordered gate sequence on a fixed-width register. Gates are validated
/// against the register on construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(n)?;
        }
        Ok(Self { n, gates })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    /// Builds a circuit from gates known to be valid for `n` qubits.
    pub(crate) fn from_trusted(n: usize, gates: Vec<Gate>) -> Self {
        debug_assert!(gates.iter().all(|g| g.validate(n).is_ok()));
        Self { n, gates }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other` (which must have the same width) after `self`.
    pub fn then(mut self, other: &Circuit) -> Result<Circuit> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(self)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Re-homes the circuit into a wider register, shifting qubits by `offset`.
    pub fn embed(&self, n: usize, offset: usize) -> Result<Circuit> {
        if offset + self.n > n {
            return Err(Error::DimensionMismatch { expected: n, found: offset + self.n });
        }
        Ok(Circuit {
            n,
            gates: self.gates.iter().map(|g| g.shifted(offset)).collect(),
        })
    }

    /// The whole circuit as a single gate controlled on `controls`.
    pub fn controlled_gate(&self, controls: Vec<usize>) -> Gate {
        Gate::Controlled { controls, body: self.gates.clone() }
    }

    /// Applies the gates in order to a working buffer.
    pub fn apply_in_place(&self, state: &mut Statevector) -> Result<()> {
        if state.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: state.num_qubits() });
        }
        let amps = state.amplitudes_mut();
        for g in &self.gates {
            g.apply_masked(amps, 0);
        }
        Ok(())
    }

    /// Runs the circuit on `|0...0>` with a qubit ceiling of `cap`.
    pub fn prepare_with_cap(&self, cap: usize) -> Result<Statevector> {
        let mut s = Statevector::zero_with_cap(self.n, cap)?;
        self.apply_in_place(&mut s)?;
        Ok(s)
    }

    /// Runs the circuit on `|0...0>`.
    pub fn prepare(&self) -> Result<Statevector> {
        let mut s = Statevector::zero(self.n)?;
        self.apply_in_place(&mut s)?;
        Ok(s)
    }

    /// Dense `2^n x 2^n` unitary, built column by column from basis states.
    pub fn dense(&self) -> Result<DMatrix<Complex64>> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut s = Statevector::basis_with_cap(self.n, col, 16)?;
            self.apply_in_place(&mut s)?;
            for (row, a) in s.amplitudes().iter().enumerate() {
                m[(row, col)] = *a;
            }
        }
        Ok(m)
    }
}

/// Returns a fresh state with `gate` applied.
pub fn apply_gate(state: &Statevector, gate: &Gate) -> Result<Statevector> {
    gate.validate(state.num_qubits())?;
    let mut out = state.clone();
    gate.apply_masked(out.amplitudes_mut(), 0);
    Ok(out)
}

/// Returns a fresh state with every gate of `circuit` applied in order.
pub fn run_circuit(circuit: &Circuit, initial: &Statevector) -> Result<Statevector> {
    let mut out = initial.clone();
    circuit.apply_in_place(&mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hadamard_on_zero() {
        let s = apply_gate(&Statevector::zero(1).unwrap(), &Gate::Hadamard { qubit: 0 }).unwrap();
        assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ry_identity_and_quarter_turn() {
        let psi = Statevector::from_amplitudes(1, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let same = apply_gate(&psi, &Gate::RotY { qubit: 0, angle: 0.0 }).unwrap();
        assert_eq!(same, psi);
        let s = apply_gate(&Statevector::zero(1).unwrap(), &Gate::RotY { qubit: 0, angle: FRAC_PI_2 })
            .unwrap();
        // e^{-i(pi/2)Y/2}|0> = (cos pi/4, sin pi/4)
        assert!((s.amplitudes()[0] - c(FRAC_PI_4.cos(), 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(FRAC_PI_4.sin(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn x_then_z_gives_minus_one() {
        let circ = Circuit::new(1, vec![Gate::PauliX { qubit: 0 }, Gate::PauliZ { qubit: 0 }]).unwrap();
        let s = run_circuit(&circ, &Statevector::zero(1).unwrap()).unwrap();
        assert!((s.amplitudes()[1] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(s.amplitudes()[0].norm() < 1e-15);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let s = run_circuit(&Circuit::empty(3), &Statevector::zero(3).unwrap()).unwrap();
        assert_eq!(s, Statevector::zero(3).unwrap());
    }

    #[test]
    fn out_of_range_and_width_errors() {
        assert!(Circuit::new(2, vec![Gate::PauliX { qubit: 2 }]).is_err());
        let circ = Circuit::empty(2);
        assert!(run_circuit(&circ, &Statevector::zero(3).unwrap()).is_err());
        assert!(apply_gate(&Statevector::zero(1).unwrap(), &Gate::PauliX { qubit: 1 }).is_err());
    }

    #[test]
    fn inverse_undoes_circuit() {
        let circ = Circuit::new(
            2,
            vec![
                Gate::Hadamard { qubit: 0 },
                Gate::Phase { qubit: 1 },
                Gate::ControlledNot { control: 0, target: 1 },
                Gate::RotZ { qubit: 1, angle: 0.3 },
                Gate::RotY { qubit: 0, angle: -1.1 },
            ],
        )
        .unwrap();
        let m = circ.dense().unwrap() * circ.inverse().dense().unwrap();
        let id = DMatrix::<Complex64>::identity(4, 4);
        assert!((m - id).norm() < 1e-13);
    }
}
