//! Turning cost values into guarantees on the prepared solution.

use serde::{Deserialize, Serialize};

use crate::cost::{effective_hamiltonian, CostEngine, CostKind, CostReport};
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{dense_solve_oracle, QlspInstance};
use crate::simulator::{Circuit, Gate, PauliString, Statevector};

const NORM_TOL: f64 = 1e-10;

/// Largest register for the dense spectral check.
pub const SPECTRAL_CAP: usize = 10;

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 1.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidKappa(kappa))
    }
}

/// `sqrt(1 − |<x|x0>|²)` for two normalized pure states.
pub fn trace_distance_pure(x: &Statevector, x0: &Statevector) -> Result<f64> {
    for s in [x, x0] {
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
    }
    let f = x.inner(x0)?.norm_sqr().min(1.0);
    Ok((1.0 - f).max(0.0).sqrt())
}

/// Upper bound on the trace distance implied by a cost value.
///
/// Untightened: `κ√c` (global kinds) and `κ√(nc)` (local kinds).
/// Tightened multiplies the radicand by `<psi|psi>` for the normalized
/// kinds. The result is clipped to `[0, 1]`.
pub fn epsilon_bound_with(
    kind: CostKind,
    cost: f64,
    psi_norm_sq: f64,
    kappa: f64,
    n: usize,
    tightened: bool,
) -> Result<f64> {
    check_kappa(kappa)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut radicand = cost.max(0.0);
    if kind.is_local() {
        radicand *= n as f64;
    }
    if tightened && kind.is_normalized() {
        radicand *= psi_norm_sq.clamp(0.0, 1.0);
    }
    Ok((kappa * radicand.sqrt()).min(1.0))
}

/// Default bound: tightened for `Local`, plain for the other kinds.
pub fn epsilon_bound(report: &CostReport, kappa: f64, n: usize) -> Result<f64> {
    epsilon_bound_with(report.kind, report.value, report.psi_norm_sq, kappa, n, report.kind == CostKind::Local)
}

/// `|<x|M|x> − <x0|M|x0>|` and its square.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableDeviation {
    pub value: f64,
    pub squared: f64,
}

pub fn observable_deviation(x: &Statevector, x0: &Statevector, m: &PauliString) -> Result<ObservableDeviation> {
    if m.num_qubits() != x.num_qubits() || x.num_qubits() != x0.num_qubits() {
        return Err(Error::MalformedPauli(m.to_string()));
    }
    let value = (x.expectation_pauli(m)? - x0.expectation_pauli(m)?).abs();
    Ok(ObservableDeviation { value, squared: value * value })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub e0: f64,
    pub e1: f64,
    pub kappa: f64,
    /// `|E0| ≤ 1e-9`
    pub ground_ok: bool,
    /// `E1 ≥ 1/κ² − 1e-9`
    pub gap_ok: bool,
}

/// Lowest two eigenvalues of the dense global Hamiltonian
/// `A†(I − |b><b|)A`.
pub fn spectral_check(inst: &QlspInstance) -> Result<SpectralReport> {
    let n = inst.num_qubits();
    if n > SPECTRAL_CAP {
        return Err(Error::QubitCap { n, cap: SPECTRAL_CAP });
    }
    let kappa = inst.kappa_or_estimate()?;
    let eig = linalg::hermitian_eigenvalues(&effective_hamiltonian(inst, CostKind::GlobalHat)?);
    let (e0, e1) = (eig[0], eig[1]);
    Ok(SpectralReport {
        e0,
        e1,
        kappa,
        ground_ok: e0.abs() <= 1e-9,
        gap_ok: e1 >= 1.0 / (kappa * kappa) - 1e-9,
    })
}

/// One observable reported on a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableEntry {
    pub pauli: PauliString,
    /// `<x|M|x>` on the prepared state.
    pub expectation: f64,
    /// `2ε` bound on `D(M)` (Pauli words have unit norm).
    pub deviation_bound: f64,
}

/// A solved instance's guarantee, serialized as JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CostKind,
    pub cost_value: f64,
    pub kappa: f64,
    pub n: usize,
    pub psi_norm_sq: f64,
    pub tightened: bool,
    pub epsilon_upper: f64,
    pub observables: Vec<ObservableEntry>,
    /// Gate list preparing the certified state, when available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<Vec<Gate>>,
}

impl Certificate {
    pub fn new(
        kind: CostKind,
        cost_value: f64,
        psi_norm_sq: f64,
        kappa: f64,
        x: &Statevector,
        observables: &[PauliString],
        tightened: bool,
    ) -> Result<Self> {
        let n = x.num_qubits();
        let epsilon_upper = epsilon_bound_with(kind, cost_value, psi_norm_sq, kappa, n, tightened)?;
        let observables = observables
            .iter()
            .map(|m| {
                Ok(ObservableEntry {
                    pauli: *m,
                    expectation: x.expectation_pauli(m)?,
                    deviation_bound: (2.0 * epsilon_upper).min(2.0),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, cost_value, kappa, n, psi_norm_sq, tightened, epsilon_upper, observables, solution: None })
    }

    pub fn with_solution(mut self, gates: Vec<Gate>) -> Self {
        self.solution = Some(gates);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Re-simulates the stored solution on `inst` and checks the recorded
    /// numbers. The dense-oracle comparison runs when `n ≤ 12`.
    pub fn verify(&self, inst: &QlspInstance, tol: f64) -> Result<Verification> {
        let gates = self
            .solution
            .clone()
            .ok_or_else(|| Error::InvalidArgument("certificate carries no solution circuit".into()))?;
        if inst.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: inst.num_qubits() });
        }
        let x = Circuit::new(self.n, gates)?.prepare()?;
        let value = CostEngine::new(inst)?.value(self.kind, &x)?;
        let epsilon = epsilon_bound_with(self.kind, value.value, value.psi_norm_sq, self.kappa, self.n, self.tightened)?;
        let true_epsilon = if self.n <= 12 { Some(trace_distance_pure(&x, &dense_solve_oracle(inst)?)?) } else { None };
        let cost_matches = (value.value - self.cost_value).abs() <= tol;
        let bound_matches = (epsilon - self.epsilon_upper).abs() <= tol.sqrt().max(tol);
        let sound = true_epsilon.is_none_or(|t| t <= epsilon + 1e-9);
        Ok(Verification {
            recomputed_cost: value.value,
            recomputed_epsilon: epsilon,
            true_epsilon,
            cost_matches,
            bound_matches,
            sound,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub recomputed_cost: f64,
    pub recomputed_epsilon: f64,
    pub true_epsilon: Option<f64>,
    pub cost_matches: bool,
    pub bound_matches: bool,
    pub sound: bool,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.cost_matches && self.bound_matches && self.sound
    }
}
