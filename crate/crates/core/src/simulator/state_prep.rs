use num_complex::Complex64;

use super::circuit::Circuit;
use super::gate::Gate;
use crate::error::{Error, Result};

/// Circuit mapping `|0...0>` exactly onto `target`, global phase included.
///
/// Rotation cascade from the most significant qubit down. Qubit `q` gets a
/// multiplexed single-qubit unitary selected by the qubits above it; the
/// last stage (qubit 0) carries the complex phases.
pub fn state_prep_circuit(n: usize, target: &[Complex64]) -> Result<Circuit> {
    if target.len() != 1usize << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: target.len() });
    }
    let norm: f64 = target.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let mut gates = Vec::with_capacity(n);
    for q in (0..n).rev() {
        let selects: Vec<usize> = (q + 1..n).collect();
        let blocks = (0..1usize << selects.len())
            .map(|s| {
                let (w0, w1) = branch_weights(target, q, s);
                unitary_from_column(w0, w1)
            })
            .collect();
        gates.push(Gate::Multiplexed { selects, target: q, blocks });
    }
    Circuit::new(n, gates)
}

/// Weights of the `bit q = 0` and `bit q = 1` branches under the prefix `s`
/// held by qubits above `q`. Complex amplitudes at `q = 0`, norms otherwise.
fn branch_weights(target: &[Complex64], q: usize, s: usize) -> (Complex64, Complex64) {
    let base = s << (q + 1);
    if q == 0 {
        return (target[base], target[base | 1]);
    }
    let span = 1usize << q;
    let w = |lo: usize| -> Complex64 {
        let r: f64 = target[lo..lo + span].iter().map(|a| a.norm_sqr()).sum();
        Complex64::new(r.sqrt(), 0.0)
    };
    (w(base), w(base | span))
}

fn unitary_from_column(a: Complex64, b: Complex64) -> [Complex64; 4] {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r < 1e-300 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        return [one, zero, zero, one];
    }
    let (a, b) = (a / r, b / r);
    [a, -b.conj(), b, a.conj()]
}
