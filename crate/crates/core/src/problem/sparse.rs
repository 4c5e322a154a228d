use num_complex::Complex64;

use super::lcu::{LcuMatrix, LcuTerm, TermOp};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::simulator::{Circuit, Gate};

const HERMITIAN_TOL: f64 = 1e-12;

/// Row-wise access to a `d`-sparse Hermitian matrix: `entry(j, i) = A_ji`
/// and `neighbor(j, l)` = column of the `l`-th nonzero in row `j`.
///
/// Rows with fewer than `d` nonzeros are padded with explicit zero entries
/// so that every row lists exactly `d` distinct columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOracle {
    n: usize,
    d: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseOracle {
    /// Builds the oracle from its nonzeros. `d` must be a power of two no
    /// larger than `2^n` and at least the largest row population.
    pub fn new(n: usize, d: usize, rows: Vec<Vec<(usize, Complex64)>>) -> Result<Self> {
        let dim = 1usize << n;
        if rows.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: rows.len() });
        }
        if d == 0 || !d.is_power_of_two() || d > dim {
            return Err(Error::InvalidArgument(format!("sparsity {d} must be a power of two in [1, {dim}]")));
        }
        let mut padded = Vec::with_capacity(dim);
        for (j, row) in rows.into_iter().enumerate() {
            let mut row: Vec<(usize, Complex64)> = row.into_iter().filter(|(_, v)| v.norm() > 0.0).collect();
            row.sort_by_key(|(i, _)| *i);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidArgument(format!("row {j} lists a column twice")));
            }
            if row.len() > d {
                return Err(Error::InvalidArgument(format!("row {j} has {} nonzeros > d = {d}", row.len())));
            }
            for &(i, v) in &row {
                if i >= dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: i });
                }
                if v.norm() > 1.0 + 1e-12 {
                    return Err(Error::EntryTooLarge { row: j, col: i, magnitude: v.norm() });
                }
            }
            let free: Vec<usize> = (0..dim).filter(|i| !row.iter().any(|(c, _)| c == i)).collect();
            let missing = d - row.len();
            row.extend(free.into_iter().take(missing).map(|i| (i, Complex64::new(0.0, 0.0))));
            padded.push(row);
        }
        let oracle = Self { n, d, rows: padded };
        for j in 0..dim {
            for &(i, v) in &oracle.rows[j] {
                if (oracle.entry(i, j).conj() - v).norm() > HERMITIAN_TOL {
                    return Err(Error::NotHermitian { row: j, col: i });
                }
            }
        }
        Ok(oracle)
    }

    /// Reads the nonzeros of a dense matrix; `d` defaults to the largest row
    /// population rounded up to a power of two.
    pub fn from_dense(m: &CMatrix, d: Option<usize>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("matrix must be square with power-of-two size, got {}x{}", m.nrows(), m.ncols())));
        }
        let n = dim.trailing_zeros() as usize;
        let rows: Vec<Vec<(usize, Complex64)>> = (0..dim)
            .map(|j| (0..dim).filter(|&i| m[(j, i)].norm() > 0.0).map(|i| (i, m[(j, i)])).collect())
            .collect();
        let pop = rows.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let d = d.unwrap_or_else(|| pop.next_power_of_two());
        Self::new(n, d, rows)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn sparsity(&self) -> usize {
        self.d
    }

    /// `A_ji`.
    pub fn entry(&self, j: usize, i: usize) -> Complex64 {
        self.rows[j]
            .iter()
            .find(|(c, _)| *c == i)
            .map_or(Complex64::new(0.0, 0.0), |(_, v)| *v)
    }

    /// `f(j, l)`, the column of the `l`-th listed entry of row `j`.
    pub fn neighbor(&self, j: usize, l: usize) -> usize {
        self.rows[j][l].0
    }

    pub fn to_dense(&self) -> CMatrix {
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for (j, row) in self.rows.iter().enumerate() {
            for &(i, v) in row {
                m[(j, i)] = v;
            }
        }
        m
    }
}

/// Register layout of the enlarged `2n + 2` qubit space.
struct Layout {
    n: usize,
}

impl Layout {
    fn r1(&self, b: usize) -> usize {
        b
    }
    fn r2(&self, b: usize) -> usize {
        self.n + b
    }
    fn q3(&self) -> usize {
        2 * self.n
    }
    fn q4(&self) -> usize {
        2 * self.n + 1
    }
    fn width(&self) -> usize {
        2 * self.n + 2
    }
}

/// Block mapping `|0>` onto `a|0> + b|1>` (with `|a|² + |b|² = 1`).
fn column_block(a: Complex64, b: Complex64) -> [Complex64; 4] {
    [a, -b.conj(), b, a.conj()]
}

/// `|src>|l> -> |src>|f(src, l)>` for `l < d`, completed to a bijection on
/// the `(src, dst)` registers. `src` is the low half of the local index.
fn neighbor_permutation(oracle: &SparseOracle, src: Vec<usize>, dst: Vec<usize>) -> Gate {
    let n = oracle.n;
    let dim = 1usize << n;
    let mut map = vec![0usize; dim * dim];
    for j in 0..dim {
        let used: Vec<usize> = (0..oracle.d).map(|l| oracle.neighbor(j, l)).collect();
        let mut rest = (0..dim).filter(|i| !used.contains(i));
        for l in 0..dim {
            let target = if l < oracle.d { used[l] } else { rest.next().expect("bijection completion") };
            map[j | (l << n)] = j | (target << n);
        }
    }
    let mut qubits = src;
    qubits.extend(dst);
    Gate::Permutation { qubits, map }
}

/// `U_x`: row register R1 fixed, spreads over the neighbours of row `j` in
/// R2 and loads `conj(√A_ji)` on q4.
fn u_x(oracle: &SparseOracle, lay: &Layout) -> Vec<Gate> {
    let n = oracle.n;
    let dim = 1usize << n;
    let logd = oracle.d.trailing_zeros() as usize;
    let mut gates: Vec<Gate> = (0..logd).map(|b| Gate::Hadamard { qubit: lay.r2(b) }).collect();
    gates.push(neighbor_permutation(oracle, (0..n).map(|b| lay.r1(b)).collect(), (0..n).map(|b| lay.r2(b)).collect()));
    // selects: R1 bits (low) then R2 bits (high) -> block index j + (i << n)
    let mut selects: Vec<usize> = (0..n).map(|b| lay.r1(b)).collect();
    selects.extend((0..n).map(|b| lay.r2(b)));
    let blocks = (0..dim * dim)
        .map(|s| {
            let (j, i) = (s & (dim - 1), s >> n);
            let v = oracle.entry(j, i);
            column_block(v.sqrt().conj(), Complex64::new((1.0 - v.norm()).max(0.0).sqrt(), 0.0))
        })
        .collect();
    gates.push(Gate::Multiplexed { selects, target: lay.q4(), blocks });
    gates
}

/// `U_y`: column register R2 fixed, spreads over the neighbours of `j'` in
/// R1 and loads `√A_{i'j'}` on q3.
fn u_y(oracle: &SparseOracle, lay: &Layout) -> Vec<Gate> {
    let n = oracle.n;
    let dim = 1usize << n;
    let logd = oracle.d.trailing_zeros() as usize;
    let mut gates: Vec<Gate> = (0..logd).map(|b| Gate::Hadamard { qubit: lay.r1(b) }).collect();
    gates.push(neighbor_permutation(oracle, (0..n).map(|b| lay.r2(b)).collect(), (0..n).map(|b| lay.r1(b)).collect()));
    // selects: R1 bits (low, i') then R2 bits (high, j')
    let mut selects: Vec<usize> = (0..n).map(|b| lay.r1(b)).collect();
    selects.extend((0..n).map(|b| lay.r2(b)));
    let blocks = (0..dim * dim)
        .map(|s| {
            let (ip, jp) = (s & (dim - 1), s >> n);
            let v = oracle.entry(ip, jp);
            column_block(v.sqrt(), Complex64::new((1.0 - v.norm()).max(0.0).sqrt(), 0.0))
        })
        .collect();
    gates.push(Gate::Multiplexed { selects, target: lay.q3(), blocks });
    gates
}

/// Swap of R1 and R2.
fn swap_registers(lay: &Layout) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(3 * lay.n);
    for b in 0..lay.n {
        let (a, c) = (lay.r1(b), lay.r2(b));
        gates.push(Gate::ControlledNot { control: a, target: c });
        gates.push(Gate::ControlledNot { control: c, target: a });
        gates.push(Gate::ControlledNot { control: a, target: c });
    }
    gates
}

/// `e^{iπP} = I − 2P` with `P` the projector onto `|0>` of R2, q3 and q4.
fn reflection(lay: &Layout) -> Vec<Gate> {
    let mut flagged: Vec<usize> = (0..lay.n).map(|b| lay.r2(b)).collect();
    flagged.push(lay.q3());
    flagged.push(lay.q4());
    let flips: Vec<Gate> = flagged.iter().map(|&q| Gate::PauliX { qubit: q }).collect();
    let last = flagged.pop().expect("at least q3 and q4");
    let mut gates = flips.clone();
    gates.push(Gate::Controlled { controls: flagged, body: vec![Gate::PauliZ { qubit: last }] });
    gates.extend(flips);
    gates
}

/// Four-term LCU of `A ⊗ |0̃><0̃|` on `2n + 2` qubits:
/// `(d/4)(W − E W − W E + E W E)` with `W = U_x† U_y S` and `E = e^{iπP}`.
pub fn sparse_to_lcu(oracle: &SparseOracle) -> Result<LcuMatrix> {
    let lay = Layout { n: oracle.n };
    let width = lay.width();
    let mut w = swap_registers(&lay);
    w.extend(u_y(oracle, &lay));
    w.extend(u_x(oracle, &lay).iter().rev().map(Gate::inverse));
    let e = reflection(&lay);
    let chain = |parts: &[&[Gate]]| -> Result<Circuit> { Circuit::new(width, parts.concat()) };
    // circuits list gates in application order, so `E W` is [W, E]
    let ops = [
        (1.0, chain(&[&w])?),
        (-1.0, chain(&[&w, &e])?),
        (-1.0, chain(&[&e, &w])?),
        (1.0, chain(&[&e, &w, &e])?),
    ];
    let scale = oracle.d as f64 / 4.0;
    let terms = ops
        .into_iter()
        .map(|(s, c)| LcuTerm { coeff: Complex64::new(s * scale, 0.0), op: TermOp::Circuit(c) })
        .collect();
    LcuMatrix::new(width, terms)
}
