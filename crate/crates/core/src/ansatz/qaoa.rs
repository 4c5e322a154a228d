use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Ansatz, Family, Slot};
use crate::cost::{effective_hamiltonian, CostKind};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::problem::QlspInstance;
use crate::simulator::Gate;

/// Largest register for which the driver is diagonalized densely.
const QAOA_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriverKind {
    GlobalHat,
    LocalHat,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaSpec {
    pub p: usize,
    pub driver: DriverKind,
    /// Multiplier applied to every driver angle.
    pub driver_scale: f64,
}

impl QaoaSpec {
    pub fn new(p: usize, driver: DriverKind) -> Self {
        Self { p, driver, driver_scale: 1.0 }
    }
}

/// Eigendecomposition of the driver Hamiltonian, shared between clones.
#[derive(Debug)]
pub(crate) struct QaoaDriver {
    n: usize,
    scale: f64,
    eigenvalues: Vec<f64>,
    vectors: CMatrix,
}

impl QaoaDriver {
    fn phases(&self, alpha: f64) -> impl Iterator<Item = Complex64> + '_ {
        let t = self.scale * alpha;
        self.eigenvalues.iter().map(move |&e| Complex64::from_polar(1.0, -e * t))
    }

    /// `exp(-i s α H_D)` as a dense gate.
    pub(crate) fn gate(&self, alpha: f64) -> Gate {
        let dim = 1usize << self.n;
        let mut left = self.vectors.clone();
        for (c, ph) in self.phases(alpha).enumerate() {
            left.column_mut(c).iter_mut().for_each(|x| *x *= ph);
        }
        let u = left * self.vectors.adjoint();
        let matrix = (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).map(|(r, c)| u[(r, c)]).collect();
        Gate::Unitary { qubits: (0..self.n).collect(), matrix }
    }

    /// In-place `amps ← Q diag(e^{-iλt}) Q† amps`.
    pub(crate) fn evolve(&self, alpha: f64, amps: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let dim = amps.len();
        scratch.clear();
        scratch.extend((0..dim).map(|k| {
            let col = self.vectors.column(k);
            col.iter().zip(amps.iter()).map(|(q, a)| q.conj() * a).sum::<Complex64>()
        }));
        for (y, ph) in scratch.iter_mut().zip(self.phases(alpha)) {
            *y *= ph;
        }
        for (r, a) in amps.iter_mut().enumerate() {
            *a = (0..dim).map(|k| self.vectors[(r, k)] * scratch[k]).sum();
        }
    }
}

/// QAOA-style ansatz: `H^{⊗n}`, then `p` rounds of
/// `exp(-i s α_{2r} H_D)` followed by `exp(-i α_{2r+1} X⊗…⊗X)`,
/// where `H_D` is the dense global or local effective Hamiltonian.
pub fn build_qaoa(inst: &QlspInstance, spec: QaoaSpec) -> Result<Ansatz> {
    let n = inst.num_qubits();
    if n > QAOA_CAP {
        return Err(Error::QubitCap { n, cap: QAOA_CAP });
    }
    if spec.p == 0 {
        return Err(Error::InvalidArgument("QAOA needs p >= 1".into()));
    }
    if !(spec.driver_scale > 0.0 && spec.driver_scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("driver scale must be positive, got {}", spec.driver_scale)));
    }
    let kind = match spec.driver {
        DriverKind::GlobalHat => CostKind::GlobalHat,
        DriverKind::LocalHat => CostKind::LocalHat,
    };
    let h = effective_hamiltonian(inst, kind)?;
    let (eigenvalues, vectors) = linalg::hermitian_eigen(&h);
    let driver = QaoaDriver { n, scale: spec.driver_scale, eigenvalues, vectors };

    let mut slots: Vec<Slot> = (0..n).map(|q| Slot::Fixed { gate: Gate::Hadamard { qubit: q } }).collect();
    for _ in 0..spec.p {
        slots.push(Slot::Driver);
        slots.push(Slot::Mixer);
    }
    let mut a = Ansatz::from_slots(n, Family::Qaoa, slots);
    a.driver = Some(Arc::new(driver));
    Ok(a)
}
