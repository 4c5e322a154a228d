//! Independent dense oracles shared by the integration tests. Nothing here
//! calls into the simulator's gate kernels: matrices are built from 2x2
//! blocks with Kronecker products.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use vqls::problem::{LcuMatrix, LcuTerm, QlspInstance, TermOp};
use vqls::simulator::{Circuit, Gate, PauliString, Statevector};

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn m2(a: [[Complex64; 2]; 2]) -> CMatrix {
    CMatrix::from_fn(2, 2, |r, k| a[r][k])
}

pub fn eye(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn pauli_2x2(ch: char) -> CMatrix {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match ch {
        'I' => m2([[o, z], [z, o]]),
        'X' => m2([[z, o], [o, z]]),
        'Y' => m2([[z, -i], [i, z]]),
        'Z' => m2([[o, z], [z, -o]]),
        _ => panic!("bad letter {ch}"),
    }
}

/// Full matrix of a Pauli word whose character `q` acts on qubit `q`
/// (qubit 0 is the least significant index bit, so it sits rightmost).
pub fn pauli_kron(word: &str) -> CMatrix {
    word.chars().fold(eye(1), |acc, ch| kron(&pauli_2x2(ch), &acc))
}

/// `m` on qubit `q` of an `n`-qubit register.
pub fn embed1(n: usize, q: usize, m: &CMatrix) -> CMatrix {
    let id = pauli_2x2('I');
    (0..n).fold(eye(1), |acc, k| kron(if k == q { m } else { &id }, &acc))
}

fn proj(bit: usize) -> CMatrix {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    if bit == 0 {
        m2([[o, z], [z, z]])
    } else {
        m2([[z, z], [z, o]])
    }
}

/// `|0><0|_c ⊗ I + |1><1|_c ⊗ m_t`.
pub fn controlled1(n: usize, control: usize, target: usize, m: &CMatrix) -> CMatrix {
    let p0 = embed1(n, control, &proj(0));
    let p1 = embed1(n, control, &proj(1));
    p0 + &p1 * embed1(n, target, m)
}

pub fn ry(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    m2([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
}

pub fn rz(theta: f64) -> CMatrix {
    let z = c(0.0, 0.0);
    m2([[Complex64::from_polar(1.0, -theta / 2.0), z], [z, Complex64::from_polar(1.0, theta / 2.0)]])
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    m2([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]])
}

/// Dense matrix of a basic gate, built without the simulator.
pub fn gate_dense(n: usize, g: &Gate) -> CMatrix {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match g {
        Gate::RotY { qubit, angle } => embed1(n, *qubit, &ry(*angle)),
        Gate::RotZ { qubit, angle } => embed1(n, *qubit, &rz(*angle)),
        Gate::Hadamard { qubit } => embed1(n, *qubit, &hadamard()),
        Gate::PauliX { qubit } => embed1(n, *qubit, &pauli_2x2('X')),
        Gate::PauliY { qubit } => embed1(n, *qubit, &pauli_2x2('Y')),
        Gate::PauliZ { qubit } => embed1(n, *qubit, &pauli_2x2('Z')),
        Gate::Phase { qubit } => embed1(n, *qubit, &m2([[o, z], [z, i]])),
        Gate::PhaseDag { qubit } => embed1(n, *qubit, &m2([[o, z], [z, -i]])),
        Gate::ControlledZ { control, target } => controlled1(n, *control, *target, &pauli_2x2('Z')),
        Gate::ControlledNot { control, target } => controlled1(n, *control, *target, &pauli_2x2('X')),
        Gate::GlobalPhase { angle } => eye(1 << n) * Complex64::from_polar(1.0, *angle),
        other => panic!("no independent oracle for {other:?}"),
    }
}

/// Product of gate matrices in application order.
pub fn circuit_dense(n: usize, gates: &[Gate]) -> CMatrix {
    gates.iter().fold(eye(1 << n), |acc, g| gate_dense(n, g) * acc)
}

pub fn random_basic_gate(n: usize, rng: &mut impl Rng) -> Gate {
    let q = rng.gen_range(0..n);
    let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let kinds = if n >= 2 { 10 } else { 8 };
    match rng.gen_range(0..kinds) {
        0 => Gate::RotY { qubit: q, angle },
        1 => Gate::RotZ { qubit: q, angle },
        2 => Gate::Hadamard { qubit: q },
        3 => Gate::PauliX { qubit: q },
        4 => Gate::PauliY { qubit: q },
        5 => Gate::PauliZ { qubit: q },
        6 => Gate::Phase { qubit: q },
        7 => Gate::PhaseDag { qubit: q },
        k => {
            let mut t = rng.gen_range(0..n - 1);
            if t >= q {
                t += 1;
            }
            if k == 8 {
                Gate::ControlledZ { control: q, target: t }
            } else {
                Gate::ControlledNot { control: q, target: t }
            }
        }
    }
}

pub fn random_circuit(n: usize, len: usize, rng: &mut impl Rng) -> Circuit {
    Circuit::new(n, (0..len).map(|_| random_basic_gate(n, rng)).collect()).unwrap()
}

/// Real-amplitude circuit (RotY and CZ only).
pub fn random_real_circuit(n: usize, len: usize, rng: &mut impl Rng) -> Circuit {
    let gates = (0..len)
        .map(|_| {
            let q = rng.gen_range(0..n);
            if n >= 2 && rng.gen_bool(0.3) {
                let t = (q + 1) % n;
                Gate::ControlledZ { control: q, target: t }
            } else {
                Gate::RotY { qubit: q, angle: rng.gen_range(-3.0..3.0) }
            }
        })
        .collect();
    Circuit::new(n, gates).unwrap()
}

pub fn random_amplitudes(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..1 << n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

pub fn random_state(n: usize, rng: &mut impl Rng) -> Statevector {
    Statevector::from_amplitudes(n, random_amplitudes(n, rng)).unwrap()
}

pub fn random_word(n: usize, rng: &mut impl Rng) -> String {
    (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)]).collect()
}

/// Random LCU of Pauli words with complex coefficients scaled so that
/// `Σ|c_l| = 1`, plus a random `|b>` circuit. Not conditioned on anything.
pub fn random_pauli_instance(n: usize, terms: usize, rng: &mut impl Rng) -> QlspInstance {
    let mut cs: Vec<Complex64> = (0..terms).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let total: f64 = cs.iter().map(|x| x.norm()).sum();
    cs.iter_mut().for_each(|x| *x /= total);
    let lcu = LcuMatrix::new(
        n,
        cs.into_iter()
            .map(|coeff| LcuTerm { coeff, op: TermOp::Pauli(random_word(n, rng).parse::<PauliString>().unwrap()) })
            .collect(),
    )
    .unwrap();
    QlspInstance::new(lcu, random_circuit(n, 3 * n, rng), None, "random-test").unwrap()
}

/// Same as [`random_pauli_instance`] but one term is a general circuit.
pub fn random_mixed_instance(n: usize, rng: &mut impl Rng) -> QlspInstance {
    let base = random_pauli_instance(n, 2, rng);
    let mut terms = base.matrix().terms().to_vec();
    terms.iter_mut().for_each(|t| t.coeff *= 0.5);
    terms.push(LcuTerm { coeff: c(0.3, -0.4), op: TermOp::Circuit(random_circuit(n, 2 * n, rng)) });
    QlspInstance::new(LcuMatrix::new(n, terms).unwrap(), base.b_prep().clone(), None, "mixed-test").unwrap()
}

/// Dense `A` built from Kronecker products of the term words.
pub fn lcu_dense(inst: &QlspInstance) -> CMatrix {
    let n = inst.num_qubits();
    inst.matrix().terms().iter().fold(CMatrix::zeros(1 << n, 1 << n), |acc, t| {
        let m = match &t.op {
            TermOp::Pauli(p) => pauli_kron(&p.to_string()),
            TermOp::Circuit(c) => circuit_dense(n, c.gates()),
        };
        acc + m * t.coeff
    })
}

pub fn column(v: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(v.len(), 1, v)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}
