use num_complex::Complex64;

use super::{evaluate_cost, Backend, CostKind, ShotConfig};
use crate::error::{Error, Result};
use crate::problem::{LcuMatrix, LcuTerm, QlspInstance, TermOp};
use crate::simulator::{Circuit, Gate, PauliString, Statevector};

const CHOI_MAX_QUBITS: usize = 6;

/// `E`: prepares `(1/√d) Σ_i |i>|i>` on `2n` qubits (first copy low).
pub fn maximally_entangled_prep(n: usize) -> Circuit {
    let mut gates: Vec<Gate> = (0..n).map(|q| Gate::Hadamard { qubit: q }).collect();
    gates.extend((0..n).map(|q| Gate::ControlledNot { control: q, target: n + q }));
    Circuit::from_trusted(2 * n, gates)
}

/// Runs the global cost with `A = I`, `U = (Ũ ⊗ I)E` and `V = (Ṽ ⊗ I)E`,
/// and returns it next to `|Tr(Ṽ†Ũ)|²/d²` computed column by column.
pub fn choi_cost_identity_check(u_tilde: &Circuit, v_tilde: &Circuit) -> Result<(f64, f64)> {
    let n = u_tilde.num_qubits();
    if v_tilde.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v_tilde.num_qubits() });
    }
    if n > CHOI_MAX_QUBITS {
        return Err(Error::QubitCap { n, cap: CHOI_MAX_QUBITS });
    }
    let e = maximally_entangled_prep(n);
    let u = e.clone().then(&u_tilde.embed(2 * n, 0)?)?;
    let v = e.then(&v_tilde.embed(2 * n, 0)?)?;
    let identity = LcuMatrix::new(
        2 * n,
        vec![LcuTerm { coeff: Complex64::new(1.0, 0.0), op: TermOp::Pauli(PauliString::identity(2 * n)) }],
    )?;
    let inst = QlspInstance::new(identity, u, Some(1.0), "choi")?;
    let cost = evaluate_cost(&inst, &v, CostKind::Global, Backend::Direct, &ShotConfig::exact())?.value;

    let dim = 1usize << n;
    let mut trace = Complex64::new(0.0, 0.0);
    for k in 0..dim {
        let basis = Statevector::basis(n, k)?;
        let mut uk = basis.clone();
        u_tilde.apply_in_place(&mut uk)?;
        let mut vk = basis;
        v_tilde.apply_in_place(&mut vk)?;
        trace += vk.inner(&uk)?;
    }
    let magnitude = trace.norm_sqr() / (dim * dim) as f64;
    Ok((cost, magnitude))
}
