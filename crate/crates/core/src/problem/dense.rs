use num_complex::Complex64;

use super::lcu::{LcuMatrix, TermOp};
use super::QlspInstance;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::simulator::{PauliString, Statevector};

/// Largest register for which dense matrices are assembled.
pub const DENSE_CAP: usize = 12;

pub(crate) fn check_dense_cap(n: usize) -> Result<()> {
    if n > DENSE_CAP {
        Err(Error::QubitCap { n, cap: DENSE_CAP })
    } else {
        Ok(())
    }
}

/// Dense matrix of a Pauli word.
pub fn pauli_dense(p: &PauliString) -> CMatrix {
    let dim = 1usize << p.num_qubits();
    let mut m = CMatrix::zeros(dim, dim);
    let phase = p.phase();
    let (x, z) = (p.x_mask() as usize, p.z_mask() as usize);
    for k in 0..dim {
        let s = if (k & z).count_ones() & 1 == 1 { -phase } else { phase };
        m[(k ^ x, k)] = s;
    }
    m
}

/// `Σ_l c_l · dense(A_l)`.
pub fn assemble_dense(a: &LcuMatrix) -> Result<CMatrix> {
    check_dense_cap(a.num_qubits())?;
    let dim = 1usize << a.num_qubits();
    let mut m = CMatrix::zeros(dim, dim);
    for t in a.terms() {
        let d = match &t.op {
            TermOp::Pauli(p) => pauli_dense(p),
            TermOp::Circuit(c) => c.dense()?,
        };
        m += d * t.coeff;
    }
    Ok(m)
}

/// `|b> = U|0...0>` as a column vector.
pub fn b_vector(inst: &QlspInstance) -> Result<CVector> {
    let b = inst.b_state()?;
    Ok(CVector::from_column_slice(b.amplitudes()))
}

/// Classical reference solution `|x0> ∝ A^{-1}|b>`, normalized.
pub fn dense_solve_oracle(inst: &QlspInstance) -> Result<Statevector> {
    check_dense_cap(inst.num_qubits())?;
    let a = assemble_dense(inst.matrix())?;
    let x = linalg::solve(&a, &b_vector(inst)?)?;
    let amps: Vec<Complex64> = x.iter().copied().collect();
    Statevector::unnormalized(inst.num_qubits(), amps)?
        .into_normalized()
        .map_err(|_| Error::Singular("solution has vanishing norm".into()))
}
