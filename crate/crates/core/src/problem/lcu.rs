use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::simulator::{Circuit, Gate, PauliString, Statevector};

/// The unitary of one LCU term.
#[derive(Clone, Debug, PartialEq)]
pub enum TermOp {
    Pauli(PauliString),
    Circuit(Circuit),
}

impl TermOp {
    /// Gate-level form, used when the term has to be controlled or inverted
    /// inside a test circuit.
    pub fn gates(&self) -> Vec<Gate> {
        match self {
            TermOp::Pauli(p) => (0..p.num_qubits())
                .filter_map(|q| match p.letter(q) {
                    'X' => Some(Gate::PauliX { qubit: q }),
                    'Y' => Some(Gate::PauliY { qubit: q }),
                    'Z' => Some(Gate::PauliZ { qubit: q }),
                    _ => None,
                })
                .collect(),
            TermOp::Circuit(c) => c.gates().to_vec(),
        }
    }

    pub fn inverse_gates(&self) -> Vec<Gate> {
        match self {
            // Pauli words are self-inverse
            TermOp::Pauli(_) => self.gates(),
            TermOp::Circuit(c) => c.inverse().into_gates(),
        }
    }

    /// `out = op * input` on raw amplitudes.
    pub fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        match self {
            TermOp::Pauli(p) => p.apply_into(input, out),
            TermOp::Circuit(c) => {
                out.copy_from_slice(input);
                for g in c.gates() {
                    g.apply_masked(out, 0);
                }
            }
        }
    }

    /// `acc += coeff * op * input`.
    pub fn accumulate(&self, coeff: Complex64, input: &[Complex64], acc: &mut [Complex64], scratch: &mut [Complex64]) {
        match self {
            TermOp::Pauli(p) => {
                let f = coeff * p.phase();
                let (x, z) = (p.x_mask() as usize, p.z_mask() as usize);
                for (k, a) in input.iter().enumerate() {
                    let t = f * a;
                    if (k & z).count_ones() & 1 == 1 {
                        acc[k ^ x] -= t;
                    } else {
                        acc[k ^ x] += t;
                    }
                }
            }
            TermOp::Circuit(_) => {
                self.apply_into(input, scratch);
                acc.iter_mut().zip(scratch.iter()).for_each(|(a, s)| *a += coeff * s);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LcuTerm {
    pub coeff: Complex64,
    pub op: TermOp,
}

impl LcuTerm {
    pub fn pauli(coeff: f64, word: &str) -> Result<Self> {
        Ok(Self { coeff: Complex64::new(coeff, 0.0), op: TermOp::Pauli(word.parse()?) })
    }
}

/// `A = Σ_l c_l A_l` with each `A_l` unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct LcuMatrix {
    n: usize,
    terms: Vec<LcuTerm>,
}

impl LcuMatrix {
    pub fn new(n: usize, terms: Vec<LcuTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("an LCU needs at least one term".into()));
        }
        for t in &terms {
            let width = match &t.op {
                TermOp::Pauli(p) => p.num_qubits(),
                TermOp::Circuit(c) => c.num_qubits(),
            };
            if width != n {
                return Err(Error::DimensionMismatch { expected: n, found: width });
            }
            if !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
                return Err(Error::InvalidArgument("non-finite LCU coefficient".into()));
            }
        }
        Ok(Self { n, terms })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[LcuTerm] {
        &self.terms
    }

    pub fn coeffs(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.coeff).collect()
    }

    /// `Σ |c_l|`, an upper bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    pub fn is_pauli_sum(&self) -> bool {
        self.terms.iter().all(|t| matches!(t.op, TermOp::Pauli(_)))
    }

    /// `A|x>` as an unnormalized state.
    pub fn apply(&self, x: &Statevector) -> Result<Statevector> {
        if x.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.num_qubits() });
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); x.dim()];
        let mut scratch = vec![Complex64::new(0.0, 0.0); x.dim()];
        for t in &self.terms {
            t.op.accumulate(t.coeff, x.amplitudes(), &mut acc, &mut scratch);
        }
        Statevector::unnormalized(self.n, acc)
    }

    /// `A_l|x>` for a single term.
    pub fn apply_term(&self, l: usize, x: &Statevector) -> Result<Statevector> {
        let t = self.terms.get(l).ok_or_else(|| Error::InvalidArgument(format!("term {l} out of range")))?;
        if x.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.num_qubits() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); x.dim()];
        t.op.apply_into(x.amplitudes(), &mut out);
        Statevector::unnormalized(self.n, out)
    }
}
