use num_complex::Complex64;

use super::CostKind;
use crate::error::Result;
use crate::linalg::CMatrix;
use crate::problem::{assemble_dense, check_dense_cap, QlspInstance};

/// Dense effective Hamiltonian whose expectation in `|x>` is the hat cost:
/// `H_G = A†(I − |b><b|)A` for the global kinds and
/// `H_L = A†U(I − (1/n)Σ_j |0_j><0_j|)U†A` for the local kinds.
pub fn effective_hamiltonian(inst: &QlspInstance, kind: CostKind) -> Result<CMatrix> {
    let n = inst.num_qubits();
    check_dense_cap(n)?;
    let dim = 1usize << n;
    let a = assemble_dense(inst.matrix())?;
    let u = inst.b_prep().dense()?;
    let middle = if kind.is_local() {
        // I − (1/n)Σ_j P0_j is diagonal with entries popcount(k)/n
        let diag = CMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                Complex64::new(r.count_ones() as f64 / n as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        &u * diag * u.adjoint()
    } else {
        let b = u.column(0);
        CMatrix::identity(dim, dim) - b * b.adjoint()
    };
    let h = a.adjoint() * middle * &a;
    // symmetrize away rounding
    Ok((&h + h.adjoint()) * Complex64::new(0.5, 0.0))
}
