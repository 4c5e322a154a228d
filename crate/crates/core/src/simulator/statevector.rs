use num_complex::Complex64;

use super::pauli::PauliString;
use crate::error::{Error, Result};

/// Default ceiling on register size; 2^14 amplitudes keeps every test in
/// laptop memory. Use the `*_with_cap` constructors to override.
pub const DEFAULT_QUBIT_CAP: usize = 14;

const NORM_TOL: f64 = 1e-10;

/// Dense amplitudes of an `n`-qubit register, little-endian: qubit 0 is
/// the least significant bit of the basis index.
///
/// States are normalized unless built through [`Statevector::unnormalized`],
/// which is how `A|x>` is carried around.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
    normalized: bool,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n >= usize::BITS as usize - 1 {
        Err(Error::QubitCap { n, cap })
    } else {
        Ok(())
    }
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::zero_with_cap(n, DEFAULT_QUBIT_CAP)
    }

    pub fn zero_with_cap(n: usize, cap: usize) -> Result<Self> {
        Self::basis_with_cap(n, 0, cap)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        Self::basis_with_cap(n, index, DEFAULT_QUBIT_CAP)
    }

    pub fn basis_with_cap(n: usize, index: usize, cap: usize) -> Result<Self> {
        check_cap(n, cap)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: index });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps, normalized: true })
    }

    /// Wraps amplitudes that must already have unit norm.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::unnormalized(n, amps)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        s.normalized = true;
        Ok(s)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalize_from(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::unnormalized(n, amps)?;
        s.into_normalized()
    }

    /// Amplitudes with no norm constraint (the explicit opt-in used for
    /// `|psi> = A|x>`).
    pub fn unnormalized(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        // the amplitudes already exist, so only guard the shift below
        check_cap(n, usize::BITS as usize - 2)?;
        if amps.len() != 1usize << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: amps.len() });
        }
        Ok(Self { n, amps, normalized: false })
    }

    pub fn into_normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        self.normalized = true;
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `<self|P|self>` for a Pauli word no longer than the register.
    pub fn expectation_pauli(&self, pauli: &PauliString) -> Result<f64> {
        if pauli.num_qubits() > self.n {
            return Err(Error::MalformedPauli(pauli.to_string()));
        }
        let full = pauli.embed(self.n, 0)?;
        let mut v = full.expectation(&self.amps).re;
        if self.normalized {
            v = v.clamp(-1.0, 1.0);
        }
        Ok(v)
    }

    /// Probability of every basis outcome (squared amplitudes).
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `alpha * a + beta * b` as an unnormalized state.
    pub fn linear_combination(
        alpha: Complex64,
        a: &Statevector,
        beta: Complex64,
        b: &Statevector,
    ) -> Result<Statevector> {
        if a.n != b.n {
            return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
        }
        let amps = a.amps.iter().zip(&b.amps).map(|(x, y)| alpha * x + beta * y).collect();
        Statevector::unnormalized(a.n, amps)
    }
}

/// Free-function form of [`Statevector::inner`].
pub fn inner_product(a: &Statevector, b: &Statevector) -> Result<Complex64> {
    a.inner(b)
}

/// Free-function form of [`Statevector::expectation_pauli`].
pub fn expectation_pauli(state: &Statevector, pauli: &PauliString) -> Result<f64> {
    state.expectation_pauli(pauli)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn plus() -> Statevector {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Statevector::from_amplitudes(1, vec![h, h]).unwrap()
    }

    #[test]
    fn inner_products() {
        let zero = Statevector::zero(1).unwrap();
        let one = Statevector::basis(1, 1).unwrap();
        assert!((zero.inner(&zero).unwrap() - 1.0).norm() < 1e-15);
        assert!(zero.inner(&one).unwrap().norm() < 1e-15);
        assert!((plus().inner(&zero).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-15);
        let two = Statevector::zero(2).unwrap();
        assert!(zero.inner(&two).is_err());
    }

    #[test]
    fn pauli_expectations() {
        let zero = Statevector::zero(1).unwrap();
        assert_eq!(zero.expectation_pauli(&"Z".parse().unwrap()).unwrap(), 1.0);
        assert!((plus().expectation_pauli(&"X".parse().unwrap()).unwrap() - 1.0).abs() < 1e-15);
        assert!(zero.expectation_pauli(&"ZZ".parse().unwrap()).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(Statevector::zero(15), Err(Error::QubitCap { n: 15, cap: 14 })));
        assert!(Statevector::zero_with_cap(15, 16).is_ok());
    }

    #[test]
    fn from_amplitudes_checks_norm() {
        let a = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(Statevector::from_amplitudes(1, a.clone()).is_err());
        let s = Statevector::normalize_from(1, a).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }
}
