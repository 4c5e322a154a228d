use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::PauliString;
use crate::error::{Error, Result};

const UNITARY_TOL: f64 = 1e-10;

/// One instruction in a circuit.
///
/// Rotations follow `R_a(θ) = exp(-iθσ_a/2)`. The composite variants
/// (`Controlled`, `Multiplexed`, `Permutation`, `Unitary`) exist for the
/// test circuits, the sparse-matrix decomposition and state preparation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    #[serde(rename = "ry")]
    RotY { qubit: usize, angle: f64 },
    #[serde(rename = "rz")]
    RotZ { qubit: usize, angle: f64 },
    #[serde(rename = "h")]
    Hadamard { qubit: usize },
    #[serde(rename = "x")]
    PauliX { qubit: usize },
    #[serde(rename = "y")]
    PauliY { qubit: usize },
    #[serde(rename = "z")]
    PauliZ { qubit: usize },
    /// `S = diag(1, i)`.
    #[serde(rename = "s")]
    Phase { qubit: usize },
    #[serde(rename = "sdg")]
    PhaseDag { qubit: usize },
    #[serde(rename = "cz")]
    ControlledZ { control: usize, target: usize },
    #[serde(rename = "cx")]
    ControlledNot { control: usize, target: usize },
    /// `exp(-i angle/2 P)`.
    PauliRotation { pauli: PauliString, angle: f64 },
    /// `exp(i angle)` on the whole register.
    GlobalPhase { angle: f64 },
    /// `body` applied only where every control qubit is `|1>`.
    Controlled { controls: Vec<usize>, body: Vec<Gate> },
    /// Uniformly controlled single-qubit unitary: `blocks[s]` acts on
    /// `target` when the select qubits hold the value `s` (first select
    /// qubit is the least significant bit). Blocks are row-major 2x2.
    Multiplexed {
        selects: Vec<usize>,
        target: usize,
        blocks: Vec<[Complex64; 4]>,
    },
    /// Classical reversible map `|v> -> |map[v]>` on the listed qubits.
    Permutation { qubits: Vec<usize>, map: Vec<usize> },
    /// Dense row-major unitary on the listed qubits (first qubit is the
    /// least significant bit of the local index).
    Unitary { qubits: Vec<usize>, matrix: Vec<Complex64> },
}

impl Gate {
    /// Every qubit the gate touches, controls included.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::RotY { qubit, .. }
            | Gate::RotZ { qubit, .. }
            | Gate::Hadamard { qubit }
            | Gate::PauliX { qubit }
            | Gate::PauliY { qubit }
            | Gate::PauliZ { qubit }
            | Gate::Phase { qubit }
            | Gate::PhaseDag { qubit } => vec![*qubit],
            Gate::ControlledZ { control, target } | Gate::ControlledNot { control, target } => {
                vec![*control, *target]
            }
            Gate::PauliRotation { pauli, .. } => (0..pauli.num_qubits())
                .filter(|&q| pauli.letter(q) != 'I')
                .collect(),
            Gate::GlobalPhase { .. } => Vec::new(),
            Gate::Controlled { controls, body } => {
                let mut qs = controls.clone();
                let mut inner: Vec<usize> = body.iter().flat_map(|g| g.qubits()).collect();
                inner.sort_unstable();
                inner.dedup();
                qs.extend(inner);
                qs
            }
            Gate::Multiplexed { selects, target, .. } => {
                let mut qs = selects.clone();
                qs.push(*target);
                qs
            }
            Gate::Permutation { qubits, .. } | Gate::Unitary { qubits, .. } => qubits.clone(),
        }
    }

    /// Checks qubit indices against an `n`-qubit register and the
    /// unitarity of composite payloads.
    pub fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        let mut seen = vec![false; n];
        for &q in &qs {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
            if seen[q] {
                return Err(Error::DuplicateQubit(q));
            }
            seen[q] = true;
        }
        match self {
            Gate::PauliRotation { pauli, .. } if pauli.num_qubits() > n => {
                Err(Error::QubitOutOfRange { qubit: pauli.num_qubits() - 1, n })
            }
            Gate::Controlled { body, .. } => body.iter().try_for_each(|g| g.validate(n)),
            Gate::Multiplexed { selects, blocks, .. } => {
                if blocks.len() != 1 << selects.len() {
                    return Err(Error::DimensionMismatch {
                        expected: 1 << selects.len(),
                        found: blocks.len(),
                    });
                }
                for b in blocks {
                    let dev = unitary_deviation(b, 2);
                    if dev > UNITARY_TOL {
                        return Err(Error::NotUnitary(dev));
                    }
                }
                Ok(())
            }
            Gate::Permutation { qubits, map } => {
                let dim = 1usize << qubits.len();
                if map.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: map.len() });
                }
                let mut hit = vec![false; dim];
                for &m in map {
                    if m >= dim || hit[m] {
                        return Err(Error::InvalidArgument("permutation map is not a bijection".into()));
                    }
                    hit[m] = true;
                }
                Ok(())
            }
            Gate::Unitary { qubits, matrix } => {
                let dim = 1usize << qubits.len();
                if matrix.len() != dim * dim {
                    return Err(Error::DimensionMismatch { expected: dim * dim, found: matrix.len() });
                }
                let dev = unitary_deviation(matrix, dim);
                if dev > UNITARY_TOL {
                    return Err(Error::NotUnitary(dev));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::RotY { qubit, angle } => Gate::RotY { qubit: *qubit, angle: -angle },
            Gate::RotZ { qubit, angle } => Gate::RotZ { qubit: *qubit, angle: -angle },
            Gate::Phase { qubit } => Gate::PhaseDag { qubit: *qubit },
            Gate::PhaseDag { qubit } => Gate::Phase { qubit: *qubit },
            Gate::PauliRotation { pauli, angle } => Gate::PauliRotation { pauli: *pauli, angle: -angle },
            Gate::GlobalPhase { angle } => Gate::GlobalPhase { angle: -angle },
            Gate::Controlled { controls, body } => Gate::Controlled {
                controls: controls.clone(),
                body: body.iter().rev().map(Gate::inverse).collect(),
            },
            Gate::Multiplexed { selects, target, blocks } => Gate::Multiplexed {
                selects: selects.clone(),
                target: *target,
                blocks: blocks
                    .iter()
                    .map(|b| [b[0].conj(), b[2].conj(), b[1].conj(), b[3].conj()])
                    .collect(),
            },
            Gate::Permutation { qubits, map } => {
                let mut inv = vec![0; map.len()];
                for (v, &m) in map.iter().enumerate() {
                    inv[m] = v;
                }
                Gate::Permutation { qubits: qubits.clone(), map: inv }
            }
            Gate::Unitary { qubits, matrix } => {
                let dim = 1usize << qubits.len();
                let mut adj = vec![Complex64::new(0.0, 0.0); dim * dim];
                for r in 0..dim {
                    for c in 0..dim {
                        adj[c * dim + r] = matrix[r * dim + c].conj();
                    }
                }
                Gate::Unitary { qubits: qubits.clone(), matrix: adj }
            }
            other => other.clone(),
        }
    }

    /// Shifts every qubit index by `offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        let s = |q: &usize| q + offset;
        match self {
            Gate::RotY { qubit, angle } => Gate::RotY { qubit: s(qubit), angle: *angle },
            Gate::RotZ { qubit, angle } => Gate::RotZ { qubit: s(qubit), angle: *angle },
            Gate::Hadamard { qubit } => Gate::Hadamard { qubit: s(qubit) },
            Gate::PauliX { qubit } => Gate::PauliX { qubit: s(qubit) },
            Gate::PauliY { qubit } => Gate::PauliY { qubit: s(qubit) },
            Gate::PauliZ { qubit } => Gate::PauliZ { qubit: s(qubit) },
            Gate::Phase { qubit } => Gate::Phase { qubit: s(qubit) },
            Gate::PhaseDag { qubit } => Gate::PhaseDag { qubit: s(qubit) },
            Gate::ControlledZ { control, target } => {
                Gate::ControlledZ { control: s(control), target: s(target) }
            }
            Gate::ControlledNot { control, target } => {
                Gate::ControlledNot { control: s(control), target: s(target) }
            }
            Gate::PauliRotation { pauli, angle } => Gate::PauliRotation {
                pauli: pauli
                    .embed(pauli.num_qubits() + offset, offset)
                    .expect("embedding into a larger register"),
                angle: *angle,
            },
            Gate::GlobalPhase { angle } => Gate::GlobalPhase { angle: *angle },
            Gate::Controlled { controls, body } => Gate::Controlled {
                controls: controls.iter().map(s).collect(),
                body: body.iter().map(|g| g.shifted(offset)).collect(),
            },
            Gate::Multiplexed { selects, target, blocks } => Gate::Multiplexed {
                selects: selects.iter().map(s).collect(),
                target: s(target),
                blocks: blocks.clone(),
            },
            Gate::Permutation { qubits, map } => Gate::Permutation {
                qubits: qubits.iter().map(s).collect(),
                map: map.clone(),
            },
            Gate::Unitary { qubits, matrix } => Gate::Unitary {
                qubits: qubits.iter().map(s).collect(),
                matrix: matrix.clone(),
            },
        }
    }

    /// Applies the gate to raw amplitudes, restricted to basis states whose
    /// bits in `cmask` are all set. Indices must already be validated.
    pub(crate) fn apply_masked(&self, amps: &mut [Complex64], cmask: usize) {
        match self {
            Gate::RotY { qubit, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                apply_real_2x2(amps, *qubit, [c, -s, s, c], cmask);
            }
            Gate::RotZ { qubit, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                apply_diag(amps, *qubit, Complex64::new(c, -s), Complex64::new(c, s), cmask);
            }
            Gate::Hadamard { qubit } => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                apply_real_2x2(amps, *qubit, [h, h, h, -h], cmask);
            }
            Gate::PauliX { qubit } => {
                for_pairs(amps.len(), *qubit, cmask, |i, j| amps.swap(i, j));
            }
            Gate::PauliY { qubit } => {
                let i_unit = Complex64::new(0.0, 1.0);
                for_pairs(amps.len(), *qubit, cmask, |i, j| {
                    let (a, b) = (amps[i], amps[j]);
                    amps[i] = -i_unit * b;
                    amps[j] = i_unit * a;
                });
            }
            Gate::PauliZ { qubit } => apply_phase_on_one(amps, *qubit, Complex64::new(-1.0, 0.0), cmask),
            Gate::Phase { qubit } => apply_phase_on_one(amps, *qubit, Complex64::new(0.0, 1.0), cmask),
            Gate::PhaseDag { qubit } => apply_phase_on_one(amps, *qubit, Complex64::new(0.0, -1.0), cmask),
            Gate::ControlledZ { control, target } => {
                apply_phase_on_one(amps, *target, Complex64::new(-1.0, 0.0), cmask | (1 << control));
            }
            Gate::ControlledNot { control, target } => {
                for_pairs(amps.len(), *target, cmask | (1 << control), |i, j| amps.swap(i, j));
            }
            Gate::PauliRotation { pauli, angle } => apply_pauli_rotation(amps, pauli, *angle, cmask),
            Gate::GlobalPhase { angle } => {
                let ph = Complex64::from_polar(1.0, *angle);
                for (k, a) in amps.iter_mut().enumerate() {
                    if k & cmask == cmask {
                        *a *= ph;
                    }
                }
            }
            Gate::Controlled { controls, body } => {
                let mask = controls.iter().fold(cmask, |m, &q| m | (1 << q));
                for g in body {
                    g.apply_masked(amps, mask);
                }
            }
            Gate::Multiplexed { selects, target, blocks } => {
                let t = *target;
                for_pairs(amps.len(), t, cmask, |i, j| {
                    let s = selects
                        .iter()
                        .enumerate()
                        .fold(0usize, |acc, (b, &q)| acc | (((i >> q) & 1) << b));
                    let m = &blocks[s];
                    let (a, b) = (amps[i], amps[j]);
                    amps[i] = m[0] * a + m[1] * b;
                    amps[j] = m[2] * a + m[3] * b;
                });
            }
            Gate::Permutation { qubits, map } => {
                let offsets = local_offsets(qubits);
                let qmask: usize = qubits.iter().fold(0, |m, &q| m | (1 << q));
                let mut buf = vec![Complex64::new(0.0, 0.0); offsets.len()];
                for base in 0..amps.len() {
                    if base & qmask != 0 || base & cmask != cmask {
                        continue;
                    }
                    for (v, off) in offsets.iter().enumerate() {
                        buf[map[v]] = amps[base | off];
                    }
                    for (v, off) in offsets.iter().enumerate() {
                        amps[base | off] = buf[v];
                    }
                }
            }
            Gate::Unitary { qubits, matrix } => {
                let offsets = local_offsets(qubits);
                let dim = offsets.len();
                let qmask: usize = qubits.iter().fold(0, |m, &q| m | (1 << q));
                let mut inp = vec![Complex64::new(0.0, 0.0); dim];
                for base in 0..amps.len() {
                    if base & qmask != 0 || base & cmask != cmask {
                        continue;
                    }
                    for (v, off) in offsets.iter().enumerate() {
                        inp[v] = amps[base | off];
                    }
                    for (r, off) in offsets.iter().enumerate() {
                        let row = &matrix[r * dim..(r + 1) * dim];
                        amps[base | off] = row.iter().zip(&inp).map(|(m, x)| m * x).sum();
                    }
                }
            }
        }
    }
}

fn local_offsets(qubits: &[usize]) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|v| {
            qubits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (b, &q)| acc | (((v >> b) & 1) << q))
        })
        .collect()
}

/// Calls `f(i, j)` for every index pair differing only in bit `target`
/// (with `i` holding the 0) whose control bits are set.
#[inline]
fn for_pairs(len: usize, target: usize, cmask: usize, mut f: impl FnMut(usize, usize)) {
    let stride = 1usize << target;
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            if i & cmask == cmask {
                f(i, i + stride);
            }
        }
        base += 2 * stride;
    }
}

#[inline]
fn apply_real_2x2(amps: &mut [Complex64], target: usize, m: [f64; 4], cmask: usize) {
    if cmask == 0 {
        let stride = 1usize << target;
        for chunk in amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x * m[0] + y * m[1];
                *b = x * m[2] + y * m[3];
            }
        }
        return;
    }
    for_pairs(amps.len(), target, cmask, |i, j| {
        let (a, b) = (amps[i], amps[j]);
        amps[i] = a * m[0] + b * m[1];
        amps[j] = a * m[2] + b * m[3];
    });
}

#[inline]
fn apply_diag(amps: &mut [Complex64], target: usize, d0: Complex64, d1: Complex64, cmask: usize) {
    for_pairs(amps.len(), target, cmask, |i, j| {
        amps[i] *= d0;
        amps[j] *= d1;
    });
}

#[inline]
fn apply_phase_on_one(amps: &mut [Complex64], target: usize, ph: Complex64, cmask: usize) {
    let mask = cmask | (1 << target);
    for (k, a) in amps.iter_mut().enumerate() {
        if k & mask == mask {
            *a *= ph;
        }
    }
}

fn apply_pauli_rotation(amps: &mut [Complex64], pauli: &PauliString, angle: f64, cmask: usize) {
    let (s, c) = (angle / 2.0).sin_cos();
    let phase = pauli.phase();
    let (x, z) = (pauli.x_mask() as usize, pauli.z_mask() as usize);
    let sign = |k: usize| if (k & z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
    // -i sin(θ/2) * phase
    let f = Complex64::new(0.0, -s) * phase;
    if x == 0 {
        for (k, a) in amps.iter_mut().enumerate() {
            if k & cmask == cmask {
                *a *= c + f * sign(k);
            }
        }
        return;
    }
    for k in 0..amps.len() {
        let kp = k ^ x;
        if kp < k || k & cmask != cmask {
            continue;
        }
        let (a, b) = (amps[k], amps[kp]);
        amps[k] = a * c + f * sign(kp) * b;
        amps[kp] = b * c + f * sign(k) * a;
    }
}

/// Max-abs entry of `M^† M - I` for a row-major `dim x dim` matrix.
pub(crate) fn unitary_deviation(m: &[Complex64], dim: usize) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..dim {
        for b in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..dim {
                acc += m[r * dim + a].conj() * m[r * dim + b];
            }
            if a == b {
                acc -= 1.0;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}
