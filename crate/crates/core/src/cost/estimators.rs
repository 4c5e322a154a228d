//! Ancilla-based estimators simulated on the full register: the Hadamard
//! test for β and the `Z_j` pieces of δ, and the Hadamard-Overlap test for
//! γ (and, with a bit-flip prefix, δ).

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{ShotConfig, ShotMode};
use crate::error::{Error, Result};
use crate::problem::TermOp;
use crate::simulator::{Circuit, Gate, Statevector};

/// Which component of a complex matrix element a test circuit targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Part {
    Real,
    Imag,
}

/// Shot bookkeeping of an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ShotsUsed {
    #[default]
    Exact,
    /// `raw` shots in total; the ancilla counts are the post-selected
    /// buckets of Overlap-style tests (zero for plain Hadamard tests).
    Sampled { raw: u64, ancilla_zero: u64, ancilla_one: u64 },
}

impl ShotsUsed {
    pub fn merge(self, other: ShotsUsed) -> ShotsUsed {
        match (self, other) {
            (ShotsUsed::Exact, s) | (s, ShotsUsed::Exact) => s,
            (
                ShotsUsed::Sampled { raw: a, ancilla_zero: b, ancilla_one: c },
                ShotsUsed::Sampled { raw: x, ancilla_zero: y, ancilla_one: z },
            ) => ShotsUsed::Sampled { raw: a + x, ancilla_zero: b + y, ancilla_one: c + z },
        }
    }
}

/// A ±1-valued estimate with its standard error (zero when exact).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub shots: ShotsUsed,
}

/// Inputs of a Hadamard test. `Beta` measures `<x|A_{l'}† A_l|x>`;
/// `ZTerm` measures `<x|A_{l'}† U Z_j U† A_l|x>`.
#[derive(Clone, Copy, Debug)]
pub enum HadamardWork<'a> {
    Beta { v: &'a Circuit, a_l: &'a TermOp, a_lp: &'a TermOp },
    ZTerm { v: &'a Circuit, a_l: &'a TermOp, a_lp: &'a TermOp, u: &'a Circuit, j: usize },
}

/// Circuit of the Hadamard test; the ancilla is the last qubit.
pub fn hadamard_test_circuit(work: &HadamardWork, part: Part) -> Result<Circuit> {
    let (v, a_l, a_lp) = match *work {
        HadamardWork::Beta { v, a_l, a_lp } | HadamardWork::ZTerm { v, a_l, a_lp, .. } => (v, a_l, a_lp),
    };
    let n = v.num_qubits();
    let anc = n;
    let mut gates: Vec<Gate> = v.gates().to_vec();
    gates.push(Gate::Hadamard { qubit: anc });
    if part == Part::Imag {
        gates.push(Gate::PhaseDag { qubit: anc });
    }
    gates.push(Gate::Controlled { controls: vec![anc], body: a_l.gates() });
    if let HadamardWork::ZTerm { u, j, .. } = *work {
        if j >= n {
            return Err(Error::QubitOutOfRange { qubit: j, n });
        }
        gates.extend(u.inverse().into_gates());
        gates.push(Gate::ControlledZ { control: anc, target: j });
        gates.extend(u.gates().iter().cloned());
    }
    gates.push(Gate::Controlled { controls: vec![anc], body: a_lp.inverse_gates() });
    gates.push(Gate::Hadamard { qubit: anc });
    Circuit::new(n + 1, gates)
}

/// `P(0) − P(1)` of the ancilla: the real (or, with the `S†` insertion, the
/// imaginary) part of the targeted matrix element. Sampled mode returns the
/// empirical mean of `±1` outcomes.
pub fn hadamard_test(work: &HadamardWork, part: Part, shots: &ShotConfig, stream: u64) -> Result<Estimate> {
    let circ = hadamard_test_circuit(work, part)?;
    let n = circ.num_qubits();
    let state = circ.prepare_with_cap(n.max(crate::simulator::DEFAULT_QUBIT_CAP))?;
    let amask = 1usize << (n - 1);
    let p1: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(k, _)| k & amask != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let p0 = (1.0 - p1).clamp(0.0, 1.0);
    sample_pm_one(p0, shots, stream)
}

fn sample_pm_one(p_plus: f64, shots: &ShotConfig, stream: u64) -> Result<Estimate> {
    let exact = 2.0 * p_plus - 1.0;
    match shots.mode {
        ShotMode::Exact => Ok(Estimate { value: exact, std_error: 0.0, shots: ShotsUsed::Exact }),
        ShotMode::Sampled => {
            let m = shots.shots_per_term;
            let mut rng = shots.rng(stream);
            let plus = binomial(m, p_plus, &mut rng)?;
            let mean = (2.0 * plus as f64 - m as f64) / m as f64;
            Ok(Estimate {
                value: mean,
                std_error: ((1.0 - mean * mean).max(0.0) / m as f64).sqrt(),
                shots: ShotsUsed::Sampled { raw: m, ancilla_zero: 0, ancilla_one: 0 },
            })
        }
    }
}

fn binomial(trials: u64, p: f64, rng: &mut impl Rng) -> Result<u64> {
    let p = p.clamp(0.0, 1.0);
    Binomial::new(trials, p)
        .map(|d| d.sample(rng))
        .map_err(|e| Error::Numerical(format!("binomial sampling: {e}")))
}

/// Circuit of the Hadamard-Overlap test on `2n + 1` qubits: `S1 = 0..n`
/// holds `V|0>`, `S2 = n..2n` holds `U X^r |0>`, the ancilla is `2n`.
/// Ends with the Bell-basis rotation of the Overlap circuit.
pub fn overlap_test_circuit(
    u: &Circuit,
    v: &Circuit,
    a_l: &TermOp,
    a_lp: &TermOp,
    flips: u64,
    part: Part,
) -> Result<Circuit> {
    let n = v.num_qubits();
    if u.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.num_qubits() });
    }
    let width = 2 * n + 1;
    let anc = 2 * n;
    let mut gates: Vec<Gate> = v.gates().to_vec();
    gates.extend((0..n).filter(|q| flips >> q & 1 == 1).map(|q| Gate::PauliX { qubit: n + q }));
    gates.extend(u.gates().iter().map(|g| g.shifted(n)));
    gates.push(Gate::Hadamard { qubit: anc });
    if part == Part::Imag {
        gates.push(Gate::RotZ { qubit: anc, angle: -std::f64::consts::FRAC_PI_2 });
    }
    gates.push(Gate::Controlled { controls: vec![anc], body: a_l.gates() });
    gates.push(Gate::Controlled {
        controls: vec![anc],
        body: a_lp.inverse_gates().iter().map(|g| g.shifted(n)).collect(),
    });
    gates.push(Gate::Hadamard { qubit: anc });
    for q in 0..n {
        gates.push(Gate::ControlledNot { control: q, target: n + q });
        gates.push(Gate::Hadamard { qubit: q });
    }
    Circuit::new(width, gates)
}

/// Joint probabilities `p[a][s]` of ancilla value `a` and Overlap parity
/// sign `s` (`0` for `+1`).
fn overlap_distribution(state: &Statevector, n: usize) -> [[f64; 2]; 2] {
    let low = (1usize << n) - 1;
    let mut p = [[0.0; 2]; 2];
    for (k, a) in state.amplitudes().iter().enumerate() {
        let s1 = k & low;
        let s2 = (k >> n) & low;
        let anc = (k >> (2 * n)) & 1;
        let parity = ((s1 & s2).count_ones() & 1) as usize;
        p[anc][parity] += a.norm_sqr();
    }
    p
}

fn overlap_from_distribution(p: [[f64; 2]; 2], shots: &ShotConfig, stream: u64) -> Result<Estimate> {
    // estimator (−1)^{a + parity}
    let exact = p[0][0] - p[0][1] - p[1][0] + p[1][1];
    match shots.mode {
        ShotMode::Exact => Ok(Estimate { value: exact, std_error: 0.0, shots: ShotsUsed::Exact }),
        ShotMode::Sampled => {
            let m = shots.shots_per_term;
            let mut rng = shots.rng(stream);
            let pa0 = p[0][0] + p[0][1];
            let n0 = binomial(m, pa0, &mut rng)?;
            let n1 = m - n0;
            let plus0 = if pa0 > 0.0 { binomial(n0, p[0][0] / pa0, &mut rng)? } else { 0 };
            let pa1 = p[1][0] + p[1][1];
            // on the a = 1 branch a parity of 1 contributes +1
            let plus1 = if pa1 > 0.0 { binomial(n1, p[1][1] / pa1, &mut rng)? } else { 0 };
            let plus = plus0 + plus1;
            let mean = (2.0 * plus as f64 - m as f64) / m as f64;
            Ok(Estimate {
                value: mean,
                std_error: ((1.0 - mean * mean).max(0.0) / m as f64).sqrt(),
                shots: ShotsUsed::Sampled { raw: m, ancilla_zero: n0, ancilla_one: n1 },
            })
        }
    }
}

fn run_overlap(u: &Circuit, v: &Circuit, a_l: &TermOp, a_lp: &TermOp, flips: u64, part: Part) -> Result<[[f64; 2]; 2]> {
    let circ = overlap_test_circuit(u, v, a_l, a_lp, flips, part)?;
    let width = circ.num_qubits();
    let state = circ.prepare_with_cap(width.max(crate::simulator::DEFAULT_QUBIT_CAP))?;
    Ok(overlap_distribution(&state, v.num_qubits()))
}

/// Hadamard-Overlap estimate of `Re γ_{ll'}` (or `Im` with the `R_z(−π/2)`
/// insertion), `γ_{ll'} = <b|A_l|x><x|A_{l'}†|b>`.
pub fn overlap_test(
    u: &Circuit,
    v: &Circuit,
    a_l: &TermOp,
    a_lp: &TermOp,
    part: Part,
    shots: &ShotConfig,
    stream: u64,
) -> Result<Estimate> {
    let p = run_overlap(u, v, a_l, a_lp, 0, part)?;
    overlap_from_distribution(p, shots, stream)
}

/// Overlap value with `S2` prepared in `U|r>` for a fixed bit-flip string.
#[allow(clippy::too_many_arguments)]
pub fn overlap_test_with_flips(
    u: &Circuit,
    v: &Circuit,
    a_l: &TermOp,
    a_lp: &TermOp,
    flips: u64,
    part: Part,
    shots: &ShotConfig,
    stream: u64,
) -> Result<Estimate> {
    let p = run_overlap(u, v, a_l, a_lp, flips, part)?;
    overlap_from_distribution(p, shots, stream)
}

/// `δ^{(j)}_{ll'}` through the Overlap route: the mean over the `2^{n−1}`
/// flip strings with `r_j = 0` times `2^{n−1}`, since `Σ_r U|r><r|U†`
/// over those strings is `U (|0_j><0_j| ⊗ I) U†`. Exact mode enumerates
/// every string; sampled mode draws a fresh string per shot.
#[allow(clippy::too_many_arguments)]
pub fn overlap_delta(
    u: &Circuit,
    v: &Circuit,
    a_l: &TermOp,
    a_lp: &TermOp,
    j: usize,
    part: Part,
    shots: &ShotConfig,
    stream: u64,
) -> Result<Estimate> {
    let n = v.num_qubits();
    if j >= n {
        return Err(Error::QubitOutOfRange { qubit: j, n });
    }
    let strings: Vec<u64> = (0..1u64 << n).filter(|r| r >> j & 1 == 0).collect();
    let scale = strings.len() as f64;
    let dists = strings
        .iter()
        .map(|&r| run_overlap(u, v, a_l, a_lp, r, part))
        .collect::<Result<Vec<_>>>()?;
    match shots.mode {
        ShotMode::Exact => {
            let sum: f64 = dists.iter().map(|p| p[0][0] - p[0][1] - p[1][0] + p[1][1]).sum();
            Ok(Estimate { value: sum, std_error: 0.0, shots: ShotsUsed::Exact })
        }
        ShotMode::Sampled => {
            let m = shots.shots_per_term;
            let mut rng = shots.rng(stream);
            let (mut plus, mut n0) = (0u64, 0u64);
            for _ in 0..m {
                let p = &dists[rng.gen_range(0..dists.len())];
                let x: f64 = rng.gen();
                let (a, parity) = if x < p[0][0] {
                    (0, 0)
                } else if x < p[0][0] + p[0][1] {
                    (0, 1)
                } else if x < p[0][0] + p[0][1] + p[1][0] {
                    (1, 0)
                } else {
                    (1, 1)
                };
                if a == 0 {
                    n0 += 1;
                }
                if (a + parity) % 2 == 0 {
                    plus += 1;
                }
            }
            let mean = (2.0 * plus as f64 - m as f64) / m as f64;
            Ok(Estimate {
                value: scale * mean,
                std_error: scale * ((1.0 - mean * mean).max(0.0) / m as f64).sqrt(),
                shots: ShotsUsed::Sampled { raw: m, ancilla_zero: n0, ancilla_one: m - n0 },
            })
        }
    }
}

/// Combines a real-part and an imaginary-part estimate.
pub(crate) fn complex_estimate(re: Estimate, im: Option<Estimate>) -> (Complex64, f64, f64, ShotsUsed) {
    match im {
        Some(im) => (
            Complex64::new(re.value, im.value),
            re.std_error * re.std_error,
            im.std_error * im.std_error,
            re.shots.merge(im.shots),
        ),
        None => (Complex64::new(re.value, 0.0), re.std_error * re.std_error, 0.0, re.shots),
    }
}
