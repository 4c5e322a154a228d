use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A Pauli word stored as X and Z bitmasks.
///
/// The textual form is a string over `{I, X, Y, Z}` whose character `i`
/// acts on qubit `i` (so `"XZ"` is `X` on qubit 0 and `Z` on qubit 1).
/// Internally `P = i^{#Y} X^x Z^z`, which gives `Y = iXZ` per qubit.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { n, x: 0, z: 0 }
    }

    /// Builds a word from `(qubit, letter)` pairs; unlisted qubits are `I`.
    pub fn from_sparse(n: usize, ops: &[(usize, char)]) -> Result<Self> {
        let mut chars = vec!['I'; n];
        for &(q, c) in ops {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
            chars[q] = c;
        }
        chars.into_iter().collect::<String>().parse()
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    /// Global factor `i^{#Y}`.
    pub fn phase(&self) -> Complex64 {
        match (self.x & self.z).count_ones() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Extends the word to a larger register, placing it at `offset`.
    pub fn embed(&self, n: usize, offset: usize) -> Result<Self> {
        if offset + self.n > n {
            return Err(Error::QubitOutOfRange { qubit: offset + self.n - 1, n });
        }
        Ok(Self { n, x: self.x << offset, z: self.z << offset })
    }

    /// `out[k ^ x] = phase * (-1)^{|k & z|} * amps[k]`.
    pub fn apply_into(&self, amps: &[Complex64], out: &mut [Complex64]) {
        let phase = self.phase();
        let (x, z) = (self.x as usize, self.z as usize);
        for (k, a) in amps.iter().enumerate() {
            let sign = if (k & z).count_ones() & 1 == 1 { -phase } else { phase };
            out[k ^ x] = sign * a;
        }
    }

    /// `<v|P|v>` for an amplitude vector of matching length.
    pub fn expectation(&self, amps: &[Complex64]) -> Complex64 {
        let phase = self.phase();
        let (x, z) = (self.x as usize, self.z as usize);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, a) in amps.iter().enumerate() {
            let t = amps[k ^ x].conj() * a;
            if (k & z).count_ones() & 1 == 1 {
                acc -= t;
            } else {
                acc += t;
            }
        }
        acc * phase
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n > 64 {
            return Err(Error::MalformedPauli(s.to_string()));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in s.chars().enumerate() {
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= 1 << q,
                'Z' => z |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                _ => return Err(Error::MalformedPauli(s.to_string())),
            }
        }
        Ok(Self { n, x, z })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p: PauliString = "IXYZ".parse().unwrap();
        assert_eq!(p.to_string(), "IXYZ");
        assert_eq!(p.x_mask(), 0b0110);
        assert_eq!(p.z_mask(), 0b1100);
        assert!("IXA".parse::<PauliString>().is_err());
    }

    #[test]
    fn y_is_i_x_z() {
        let y: PauliString = "Y".parse().unwrap();
        let zero = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let mut out = [Complex64::new(0.0, 0.0); 2];
        y.apply_into(&zero, &mut out);
        // Y|0> = i|1>
        assert!((out[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(out[0].norm() < 1e-15);
    }
}
