//! Dense statevector simulation. Amplitudes are little-endian: qubit 0 is
//! the least significant bit of the basis index.

mod circuit;
mod gate;
mod pauli;
mod state_prep;
mod statevector;

pub use circuit::{apply_gate, run_circuit, Circuit};
pub use gate::Gate;
pub use pauli::PauliString;
pub use state_prep::state_prep_circuit;
pub use statevector::{expectation_pauli, inner_product, Statevector, DEFAULT_QUBIT_CAP};
