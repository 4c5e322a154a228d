//! Linear-system instances: the LCU form of `A`, the `|b>` preparation and
//! the generators for the benchmark families.

mod dense;
mod families;
mod file;
mod lcu;
mod sparse;

pub use dense::{assemble_dense, b_vector, dense_solve_oracle, pauli_dense, DENSE_CAP};
pub(crate) use dense::check_dense_cap;
pub use families::{
    degenerate_qlsp, hadamard_prep, ising_qlsp, random_qlsp, random_qlsp_with_b, DEFAULT_PAIR_PROBABILITY,
};
pub use file::{ProblemFile, TermSpec};
pub use lcu::{LcuMatrix, LcuTerm, TermOp};
pub use sparse::{sparse_to_lcu, SparseOracle};

use crate::error::{Error, Result};
use crate::linalg;
use crate::simulator::{Circuit, Statevector, DEFAULT_QUBIT_CAP};

/// A linear-system instance: `A`, the circuit `U` with `|b> = U|0>`, an
/// optional known condition number and a free-form label.
#[derive(Clone, Debug, PartialEq)]
pub struct QlspInstance {
    a: LcuMatrix,
    b_prep: Circuit,
    kappa: Option<f64>,
    label: String,
}

impl QlspInstance {
    pub fn new(a: LcuMatrix, b_prep: Circuit, kappa: Option<f64>, label: impl Into<String>) -> Result<Self> {
        if a.num_qubits() != b_prep.num_qubits() {
            return Err(Error::DimensionMismatch { expected: a.num_qubits(), found: b_prep.num_qubits() });
        }
        if a.num_qubits() > DEFAULT_QUBIT_CAP {
            return Err(Error::QubitCap { n: a.num_qubits(), cap: DEFAULT_QUBIT_CAP });
        }
        if let Some(k) = kappa {
            if !k.is_finite() || k < 1.0 {
                return Err(Error::InvalidKappa(k));
            }
        }
        Ok(Self { a, b_prep, kappa, label: label.into() })
    }

    pub fn num_qubits(&self) -> usize {
        self.a.num_qubits()
    }

    pub fn matrix(&self) -> &LcuMatrix {
        &self.a
    }

    pub fn b_prep(&self) -> &Circuit {
        &self.b_prep
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn b_state(&self) -> Result<Statevector> {
        self.b_prep.prepare()
    }

    /// Condition number: the stored value, or `σ_max/σ_min` from the dense
    /// matrix when none was given (n ≤ 10).
    pub fn kappa_or_estimate(&self) -> Result<f64> {
        if let Some(k) = self.kappa {
            return Ok(k);
        }
        if self.num_qubits() > 10 {
            return Err(Error::QubitCap { n: self.num_qubits(), cap: 10 });
        }
        let sv = linalg::singular_values(&assemble_dense(&self.a)?);
        let (hi, lo) = (sv[0], sv[sv.len() - 1]);
        if lo <= 1e-14 * hi.max(1.0) {
            return Err(Error::Singular("smallest singular value vanishes".into()));
        }
        Ok(hi / lo)
    }

    /// Checks `σ_min ≥ 1/κ − 1e-6` and `σ_max ≤ 1 + 1e-6` on the dense matrix.
    pub fn check_spectrum(&self) -> Result<(f64, f64)> {
        let sv = linalg::singular_values(&assemble_dense(&self.a)?);
        let (hi, lo) = (sv[0], sv[sv.len() - 1]);
        if let Some(k) = self.kappa {
            if lo < 1.0 / k - 1e-6 || hi > 1.0 + 1e-6 {
                return Err(Error::Numerical(format!(
                    "singular values [{lo}, {hi}] violate kappa = {k}"
                )));
            }
        }
        Ok((lo, hi))
    }
}
