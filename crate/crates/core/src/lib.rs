//! Variational linear-system solver on a dense statevector simulator.

pub mod ansatz;
pub mod certify;
pub mod cost;
pub mod error;
pub mod gradient;
pub mod linalg;
pub mod optimizer;
pub mod problem;
pub mod simulator;

pub use error::{Error, Result};
