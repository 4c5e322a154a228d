use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{assemble_dense, check_dense_cap};
use super::lcu::{LcuMatrix, LcuTerm, TermOp};
use super::QlspInstance;
use crate::error::{Error, Result};
use crate::linalg;
use crate::simulator::{Circuit, Gate, PauliString, DEFAULT_QUBIT_CAP};

pub const DEFAULT_PAIR_PROBABILITY: f64 = 0.3;

const RANDOM_RETRIES: usize = 32;

/// Registers up to this size get a full dense eigensolve; larger ones use
/// Lanczos on the Pauli-sum action.
const DENSE_EIG_MAX: usize = 8;

/// `H^{⊗n}`.
pub fn hadamard_prep(n: usize) -> Circuit {
    Circuit::from_trusted(n, (0..n).map(|q| Gate::Hadamard { qubit: q }).collect())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 1.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidKappa(kappa))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 qubits, got {n}")));
    }
    if n > DEFAULT_QUBIT_CAP {
        return Err(Error::QubitCap { n, cap: DEFAULT_QUBIT_CAP });
    }
    Ok(())
}

/// Extreme eigenvalues of a Hermitian Pauli sum.
fn pauli_sum_extremes(n: usize, terms: &[(f64, PauliString)]) -> Result<(f64, f64)> {
    let lcu = LcuMatrix::new(
        n,
        terms
            .iter()
            .map(|(c, p)| LcuTerm { coeff: Complex64::new(*c, 0.0), op: TermOp::Pauli(*p) })
            .collect(),
    )?;
    if n <= DENSE_EIG_MAX {
        check_dense_cap(n)?;
        let ev = linalg::hermitian_eigenvalues(&assemble_dense(&lcu)?);
        return Ok((ev[0], ev[ev.len() - 1]));
    }
    let mut scratch = vec![Complex64::new(0.0, 0.0); 1 << n];
    Ok(linalg::lanczos_extremes(1 << n, |x, y| {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for t in lcu.terms() {
            t.op.accumulate(t.coeff, x, y, &mut scratch);
        }
    }))
}

/// Transverse-field Ising chain `A = (Σ X_j + J Σ Z_j Z_{j+1} + η I)/ζ`,
/// rescaled so its spectrum is exactly `[1/κ, 1]`, with `|b> = |+...+>`.
pub fn ising_qlsp(n: usize, j: f64, kappa: f64) -> Result<QlspInstance> {
    check_n(n)?;
    check_kappa(kappa)?;
    if !j.is_finite() || j < 0.0 {
        return Err(Error::InvalidArgument(format!("coupling must be nonnegative, got {j}")));
    }
    let mut raw: Vec<(f64, PauliString)> = Vec::with_capacity(2 * n - 1);
    for q in 0..n {
        raw.push((1.0, PauliString::from_sparse(n, &[(q, 'X')])?));
    }
    for q in 0..n - 1 {
        raw.push((j, PauliString::from_sparse(n, &[(q, 'Z'), (q + 1, 'Z')])?));
    }
    let (lo, hi) = pauli_sum_extremes(n, &raw)?;
    let zeta = (hi - lo) / (1.0 - 1.0 / kappa);
    let eta = zeta - hi;
    let mut terms: Vec<LcuTerm> = raw
        .into_iter()
        .map(|(c, p)| LcuTerm { coeff: Complex64::new(c / zeta, 0.0), op: TermOp::Pauli(p) })
        .collect();
    terms.push(LcuTerm { coeff: Complex64::new(eta / zeta, 0.0), op: TermOp::Pauli(PauliString::identity(n)) });
    QlspInstance::new(
        LcuMatrix::new(n, terms)?,
        hadamard_prep(n),
        Some(kappa),
        format!("ising(n={n}, J={j}, kappa={kappa})"),
    )
}

/// Random two-body Pauli system `A = ξ1 (I + ξ2 Σ_{j≠k} p a σ^α_j σ^β_k)`
/// with `|b> = |+...+>`.
pub fn random_qlsp(n: usize, kappa: f64, pair_probability: f64, seed: u64) -> Result<QlspInstance> {
    random_qlsp_with_b(n, kappa, pair_probability, seed, hadamard_prep(n))
}

/// [`random_qlsp`] with a caller-supplied `|b>` preparation.
pub fn random_qlsp_with_b(
    n: usize,
    kappa: f64,
    pair_probability: f64,
    seed: u64,
    b_prep: Circuit,
) -> Result<QlspInstance> {
    check_n(n)?;
    check_kappa(kappa)?;
    if !(0.0..=1.0).contains(&pair_probability) {
        return Err(Error::InvalidArgument(format!("pair probability {pair_probability} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_RETRIES {
        let raw = draw_pairs(n, pair_probability, &mut rng)?;
        if raw.is_empty() {
            continue;
        }
        let (lo, hi) = pauli_sum_extremes(n, &raw)?;
        // the pair sum is traceless, so a usable draw straddles zero
        if hi - lo < 1e-9 || lo >= 0.0 || hi <= 0.0 {
            continue;
        }
        let xi2 = (kappa - 1.0) / (hi - kappa * lo);
        let xi1 = 1.0 / (1.0 + xi2 * hi);
        let mut terms = vec![LcuTerm { coeff: Complex64::new(xi1, 0.0), op: TermOp::Pauli(PauliString::identity(n)) }];
        terms.extend(
            raw.into_iter()
                .map(|(c, p)| LcuTerm { coeff: Complex64::new(xi1 * xi2 * c, 0.0), op: TermOp::Pauli(p) }),
        );
        return QlspInstance::new(
            LcuMatrix::new(n, terms)?,
            b_prep,
            Some(kappa),
            format!("random(n={n}, kappa={kappa}, p={pair_probability}, seed={seed})"),
        );
    }
    Err(Error::Singular(format!(
        "no usable random draw after {RANDOM_RETRIES} attempts (pair probability {pair_probability})"
    )))
}

/// One Bernoulli draw per ordered pair; identical words are merged.
fn draw_pairs(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<Vec<(f64, PauliString)>> {
    const AXES: [char; 3] = ['X', 'Y', 'Z'];
    let mut out: Vec<(f64, PauliString)> = Vec::new();
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let keep = rng.gen_bool(p);
            let a: f64 = rng.gen_range(-1.0..1.0);
            let alpha = AXES[rng.gen_range(0..3)];
            let beta = AXES[rng.gen_range(0..3)];
            if !keep || a == 0.0 {
                continue;
            }
            let word = PauliString::from_sparse(n, &[(j, alpha), (k, beta)])?;
            match out.iter_mut().find(|(_, w)| *w == word) {
                Some((c, _)) => *c += a,
                None => out.push((a, word)),
            }
        }
    }
    out.retain(|(c, _)| c.abs() > 1e-14);
    Ok(out)
}

/// The three-qubit diagonal systems with a `g = 1, 2, 4` fold degenerate
/// smallest eigenvalue, `|b> = H^{⊗3}`.
pub fn degenerate_qlsp(variant: u8, kappa: f64) -> Result<QlspInstance> {
    check_kappa(kappa)?;
    let (k, km) = (kappa + 1.0, kappa - 1.0);
    // (identity weight, [weights on Z acting on qubits 0, 1, 2], denominator)
    let (id, z, den) = match variant {
        1 => (4.0 * k, [2.0 * km, km, km], 8.0 * kappa),
        2 => (2.0 * k, [0.0, km, km], 4.0 * kappa),
        3 => (k, [0.0, 0.0, km], 2.0 * kappa),
        v => return Err(Error::InvalidArgument(format!("degenerate variant must be 1, 2 or 3, got {v}"))),
    };
    let mut terms = vec![LcuTerm { coeff: Complex64::new(id / den, 0.0), op: TermOp::Pauli(PauliString::identity(3)) }];
    for (q, w) in z.iter().enumerate() {
        if *w != 0.0 {
            terms.push(LcuTerm {
                coeff: Complex64::new(w / den, 0.0),
                op: TermOp::Pauli(PauliString::from_sparse(3, &[(q, 'Z')])?),
            });
        }
    }
    QlspInstance::new(
        LcuMatrix::new(3, terms)?,
        hadamard_prep(3),
        Some(kappa),
        format!("degenerate(A{variant}, kappa={kappa})"),
    )
}
