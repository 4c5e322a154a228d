//! Dense helpers on top of nalgebra, used for reference solutions, spectra
//! and the QAOA driver exponentials.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Solves `m x = b` by LU with partial pivoting.
pub fn solve(m: &CMatrix, b: &CVector) -> Result<CVector> {
    let x = m
        .clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Singular("LU factorization has a zero pivot".into()))?;
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Singular("solution is not finite".into()));
    }
    Ok(x)
}

/// Smallest and largest eigenvalue of the Hermitian operator whose action is
/// `matvec`, by Lanczos with full reorthogonalization. Converges to machine
/// precision for the extremes once the Krylov space is large enough.
pub fn lanczos_extremes(dim: usize, mut matvec: impl FnMut(&[Complex64], &mut [Complex64])) -> (f64, f64) {
    let steps = dim.min(160);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(steps);
    // deterministic start vector with weight on every basis state
    let mut v: Vec<Complex64> = (0..dim)
        .map(|k| Complex64::new(1.0 + 0.37 * ((k * 7919) % 101) as f64 / 101.0, 0.0))
        .collect();
    normalize(&mut v);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas: Vec<f64> = Vec::with_capacity(steps);
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    for _ in 0..steps {
        matvec(&v, &mut w);
        let a: Complex64 = v.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
        alphas.push(a.re);
        basis.push(v.clone());
        // two passes of Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c: Complex64 = q.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                w.iter_mut().zip(q).for_each(|(y, x)| *y -= c * x);
            }
        }
        let b = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if b < 1e-12 {
            break;
        }
        betas.push(b);
        v = w.iter().map(|x| x / b).collect();
    }
    let k = alphas.len();
    let t = DMatrix::<f64>::from_fn(k, k, |r, c| {
        if r == c {
            alphas[r]
        } else if r + 1 == c {
            betas[r]
        } else if c + 1 == r {
            betas[c]
        } else {
            0.0
        }
    });
    let ev = t.symmetric_eigenvalues();
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Kahan-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub fn add(&mut self, x: Complex64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}
