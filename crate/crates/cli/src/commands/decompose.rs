use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use serde::Deserialize;
use vqls::linalg::CMatrix;
use vqls::problem::{assemble_dense, sparse_to_lcu, ProblemFile, QlspInstance, SparseOracle};
use vqls::simulator::{Circuit, Gate};

use crate::error::{CliError, EXIT_NUMERICAL};
use crate::output::write_atomic;

/// Deviation above which `--verify` reports a failed reconstruction.
const VERIFY_TOL: f64 = 1e-10;

/// The decomposition uses `2n + 2` qubits; this keeps it within dense reach.
const MAX_SPARSE_QUBITS: usize = 4;

/// Sparse Hermitian input: nonzeros as `[row, col, re, im]`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseFile {
    pub n: usize,
    #[serde(default)]
    pub d: Option<usize>,
    pub entries: Vec<(usize, usize, f64, f64)>,
}

impl SparseFile {
    pub fn to_oracle(&self, d: Option<usize>) -> Result<SparseOracle, CliError> {
        if self.n == 0 || self.n > MAX_SPARSE_QUBITS {
            return Err(CliError::config(format!("sparse input needs 1 <= n <= {MAX_SPARSE_QUBITS}, got {}", self.n)));
        }
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for &(r, c, re, im) in &self.entries {
            if r >= dim || c >= dim {
                return Err(CliError::config(format!("entry ({r}, {c}) outside a {dim}x{dim} matrix")));
            }
            m[(r, c)] += Complex64::new(re, im);
        }
        Ok(SparseOracle::from_dense(&m, d.or(self.d))?)
    }
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// Sparse matrix file (JSON: n, optional d, entries [[row, col, re, im], ...])
    #[arg(long)]
    pub input: PathBuf,
    /// Sparsity d (power of two); default from the file or the densest row
    #[arg(long)]
    pub d: Option<usize>,
    /// Destination problem file
    #[arg(long, short)]
    pub output: PathBuf,
    /// Re-assemble the LCU densely and report the deviation from the input
    #[arg(long)]
    pub verify: bool,
}

pub fn run(args: &DecomposeArgs) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&args.input)?;
    let file: SparseFile =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", args.input.display())))?;
    let oracle = file.to_oracle(args.d)?;
    let lcu = sparse_to_lcu(&oracle)?;
    let width = lcu.num_qubits();
    // |b> = H on the system register, ancillas left in |0>
    let b = Circuit::new(width, (0..file.n).map(|q| Gate::Hadamard { qubit: q }).collect())?;
    let inst = QlspInstance::new(lcu, b, None, format!("sparse(n={}, d={})", file.n, oracle.sparsity()))?;
    write_atomic(&args.output, &(ProblemFile::from_instance(&inst).to_json()? + "\n"))?;

    let mut summary = serde_json::json!({
        "status": "ok",
        "output": args.output,
        "qubits": width,
        "terms": inst.matrix().num_terms(),
        "sparsity": oracle.sparsity(),
    });
    if args.verify {
        let deviation = reconstruction_error(&oracle, &assemble_dense(inst.matrix())?);
        summary["max_deviation"] = deviation.into();
        if deviation.is_nan() || deviation > VERIFY_TOL {
            summary["status"] = "mismatch".into();
            println!("{summary}");
            return Ok(EXIT_NUMERICAL);
        }
    }
    println!("{summary}");
    Ok(0)
}

/// Largest entrywise gap between the assembled LCU and `A ⊗ |0̃><0̃|`
/// (system on the low bits, every ancilla in `|0>`).
fn reconstruction_error(oracle: &SparseOracle, full: &CMatrix) -> f64 {
    let a = oracle.to_dense();
    let dim = a.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..full.nrows() {
        for c in 0..full.ncols() {
            let want = if r < dim && c < dim { a[(r, c)] } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((full[(r, c)] - want).norm());
        }
    }
    worst
}
