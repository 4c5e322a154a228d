//! The four cost functions and their `β/γ/δ` constituents.
//!
//! Two interchangeable backends: `Direct` reads matrix elements straight
//! off the statevector, `Circuit` simulates the Hadamard and
//! Hadamard-Overlap test circuits (exactly or with finite shots).

mod choi;
mod engine;
mod estimators;
mod hamiltonian;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use choi::{choi_cost_identity_check, maximally_entangled_prep};
pub use engine::{beta_term, delta_term, evaluate_cost, gamma_term, CostEngine, CostValue};
pub use hamiltonian::effective_hamiltonian;
pub use estimators::{
    hadamard_test, hadamard_test_circuit, overlap_delta, overlap_test, overlap_test_circuit, overlap_test_with_flips,
    Estimate, HadamardWork, Part, ShotsUsed,
};

use crate::error::Error;
use crate::linalg::CMatrix;

/// Smallest `<psi|psi>` accepted by the normalized costs.
pub const MIN_PSI_NORM_SQ: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostKind {
    /// `<psi|psi> − |<b|psi>|²`
    GlobalHat,
    /// `1 − |<b|psi>|² / <psi|psi>`
    Global,
    /// `<psi|psi> − (1/n) Σ_j <psi|U P0_j U†|psi>`
    LocalHat,
    /// local hat divided by `<psi|psi>`
    Local,
}

impl CostKind {
    pub const ALL: [CostKind; 4] = [CostKind::GlobalHat, CostKind::Global, CostKind::LocalHat, CostKind::Local];

    pub fn is_normalized(self) -> bool {
        matches!(self, CostKind::Global | CostKind::Local)
    }

    pub fn is_local(self) -> bool {
        matches!(self, CostKind::LocalHat | CostKind::Local)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CostKind::GlobalHat => "global-hat",
            CostKind::Global => "global",
            CostKind::LocalHat => "local-hat",
            CostKind::Local => "local",
        }
    }
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        CostKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown cost kind {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShotMode {
    Exact,
    Sampled,
}

/// Measurement model for the circuit estimators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotConfig {
    pub mode: ShotMode,
    pub shots_per_term: u64,
    pub seed: u64,
}

impl ShotConfig {
    pub fn exact() -> Self {
        Self { mode: ShotMode::Exact, shots_per_term: 0, seed: 0 }
    }

    pub fn sampled(shots_per_term: u64, seed: u64) -> Result<Self, Error> {
        if shots_per_term == 0 {
            return Err(Error::InvalidArgument("sampled mode needs at least one shot per term".into()));
        }
        Ok(Self { mode: ShotMode::Sampled, shots_per_term, seed })
    }

    pub fn is_exact(&self) -> bool {
        self.mode == ShotMode::Exact
    }

    /// Independent generator per estimated quantity, so results do not
    /// depend on evaluation order or thread count.
    pub(crate) fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

impl Default for ShotConfig {
    fn default() -> Self {
        Self::exact()
    }
}

/// How δ is obtained on the circuit backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaRoute {
    /// `δ = (β + <Z_j term>)/2` from Hadamard tests.
    #[default]
    Split,
    /// Hadamard-Overlap test with the bit-flip prefix, all strings.
    Overlap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    #[default]
    Direct,
    Circuit {
        delta: DeltaRoute,
    },
}

/// A cost value together with the matrices it was assembled from.
#[derive(Clone, Debug, PartialEq)]
pub struct CostReport {
    pub kind: CostKind,
    pub value: f64,
    pub psi_norm_sq: f64,
    /// `β_{ll'} = <x|A_{l'}† A_l|x>`
    pub beta: CMatrix,
    /// `γ_{ll'} = <b|A_l|x><x|A_{l'}†|b>` (global kinds)
    pub gamma: Option<CMatrix>,
    /// `δ^{(j)}_{ll'}`, one matrix per qubit `j` (local kinds)
    pub delta: Option<Vec<CMatrix>>,
    pub shots_used: ShotsUsed,
    /// Standard error of `value` in sampled mode. Exact for the hat kinds;
    /// first-order propagation (independent terms) for the normalized ones.
    pub std_error: Option<f64>,
}
