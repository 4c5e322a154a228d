//! Parameterized trial circuits `V(α)`.
//!
//! An [`Ansatz`] is a list of slots. Fixed slots carry a concrete gate;
//! every other slot consumes the next entry of `α`, in slot order.

mod qaoa;

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use qaoa::{build_qaoa, DriverKind, QaoaSpec};

use crate::error::{Error, Result};
use crate::simulator::{Circuit, Gate, PauliString, Statevector};
use qaoa::QaoaDriver;

/// Angles inserted by [`Ansatz::grow_variable`].
pub const GROWTH_BLOCK_SIZE: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "slot", rename_all = "snake_case")]
pub enum Slot {
    Fixed { gate: Gate },
    RotY { qubit: usize },
    RotZ { qubit: usize },
    /// `exp(-i s α H_D)` with `s` the driver scale.
    Driver,
    /// `exp(-i α X⊗…⊗X)`.
    Mixer,
}

impl Slot {
    pub fn is_parameterized(&self) -> bool {
        !matches!(self, Slot::Fixed { .. })
    }

    /// True for gates of the form `exp(-iασ/2)` with `σ² = I`.
    pub fn is_shift_compatible(&self) -> bool {
        matches!(self, Slot::RotY { .. } | Slot::RotZ { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Hea,
    Qaoa,
    Variable,
}

/// A gate-placement structure plus a current parameter vector.
#[derive(Clone, Debug)]
pub struct Ansatz {
    n: usize,
    family: Family,
    slots: Vec<Slot>,
    params: Vec<f64>,
    driver: Option<Arc<QaoaDriver>>,
}

/// Where a growth step inserted its block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Growth {
    pub slot_position: usize,
    pub param_offset: usize,
    pub qubit: usize,
}

fn hea_slots(n: usize, layers: usize, extended: bool) -> Vec<Slot> {
    let mut slots = Vec::new();
    let rot = |slots: &mut Vec<Slot>, q: usize| {
        slots.push(Slot::RotY { qubit: q });
        if extended {
            slots.push(Slot::RotZ { qubit: q });
        }
    };
    for q in 0..n {
        rot(&mut slots, q);
    }
    for _ in 0..layers {
        for start in [0, 1] {
            let pairs: Vec<usize> = (start..n.saturating_sub(1)).step_by(2).collect();
            for &q in &pairs {
                slots.push(Slot::Fixed { gate: Gate::ControlledZ { control: q, target: q + 1 } });
            }
            for &q in &pairs {
                rot(&mut slots, q);
                rot(&mut slots, q + 1);
            }
        }
    }
    slots
}

fn check_hea_args(n: usize, layers: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("hardware-efficient ansatz needs n >= 2, got {n}")));
    }
    if layers == 0 {
        return Err(Error::InvalidArgument("hardware-efficient ansatz needs at least one layer".into()));
    }
    Ok(())
}

/// Layered hardware-efficient ansatz: a `RotY` column, then per layer CZ on
/// pairs `(0,1),(2,3),…` followed by `RotY` on those qubits, then CZ on
/// `(1,2),(3,4),…` followed by `RotY` on those qubits.
///
/// Parameters: `n + layers·(2n − 2)`. Gates: `n + 3·layers·(n − 1)`.
pub fn build_hea(n: usize, layers: usize) -> Result<Ansatz> {
    check_hea_args(n, layers)?;
    Ok(Ansatz::from_slots(n, Family::Hea, hea_slots(n, layers, false)))
}

/// As [`build_hea`] with a `RotZ` after every `RotY`, for problems with
/// complex amplitudes.
pub fn build_hea_extended(n: usize, layers: usize) -> Result<Ansatz> {
    check_hea_args(n, layers)?;
    Ok(Ansatz::from_slots(n, Family::Hea, hea_slots(n, layers, true)))
}

/// Closed-form `(parameters, gates)` of [`build_hea`].
pub fn hea_counts(n: usize, layers: usize) -> (usize, usize) {
    (n + layers * (2 * n - 2), n + 3 * layers * (n - 1))
}

/// Variable-structure starting point: the HEA layout with `layers` layers
/// (zero layers gives a bare `RotY` column).
pub fn build_variable(n: usize, layers: usize) -> Result<Ansatz> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("variable ansatz needs n >= 2, got {n}")));
    }
    Ok(Ansatz::from_slots(n, Family::Variable, hea_slots(n, layers, false)))
}

/// As [`build_variable`] with a `RotZ` after every starting `RotY`, for
/// problems whose solution has complex amplitudes. Growth blocks are the
/// same in both alphabets.
pub fn build_variable_extended(n: usize, layers: usize) -> Result<Ansatz> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("variable ansatz needs n >= 2, got {n}")));
    }
    Ok(Ansatz::from_slots(n, Family::Variable, hea_slots(n, layers, true)))
}

impl Ansatz {
    fn from_slots(n: usize, family: Family, slots: Vec<Slot>) -> Self {
        let count = slots.iter().filter(|s| s.is_parameterized()).count();
        Self { n, family, slots, params: vec![0.0; count], driver: None }
    }

    /// Reads a gate list back into an ansatz: `ry`/`rz` gates become
    /// parameterized slots holding their angle, everything else is fixed.
    pub fn from_gates(n: usize, family: Family, gates: &[Gate]) -> Result<Self> {
        if family == Family::Qaoa {
            return Err(Error::InvalidArgument("QAOA ansatz cannot be rebuilt from a gate list".into()));
        }
        let mut slots = Vec::with_capacity(gates.len());
        let mut params = Vec::new();
        for g in gates {
            g.validate(n)?;
            match *g {
                Gate::RotY { qubit, angle } => {
                    slots.push(Slot::RotY { qubit });
                    params.push(angle);
                }
                Gate::RotZ { qubit, angle } => {
                    slots.push(Slot::RotZ { qubit });
                    params.push(angle);
                }
                _ => slots.push(Slot::Fixed { gate: g.clone() }),
            }
        }
        Ok(Self { n, family, slots, params, driver: None })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// Gates in the bound circuit (one per slot).
    pub fn gate_count(&self) -> usize {
        self.slots.len()
    }

    /// The stored parameter vector (zeros unless set).
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Same register and family with a replacement slot list, e.g. the
    /// `final_slots` of a variable-structure run.
    pub fn with_slots(&self, slots: Vec<Slot>, alpha: &[f64]) -> Result<Ansatz> {
        for s in &slots {
            match s {
                Slot::Fixed { gate } => gate.validate(self.n)?,
                Slot::RotY { qubit } | Slot::RotZ { qubit } if *qubit >= self.n => {
                    return Err(Error::QubitOutOfRange { qubit: *qubit, n: self.n })
                }
                Slot::Driver | Slot::Mixer if self.driver.is_none() => {
                    return Err(Error::InvalidArgument("driver slots need a QAOA ansatz".into()))
                }
                _ => {}
            }
        }
        let mut out = Self { n: self.n, family: self.family, slots, params: Vec::new(), driver: self.driver.clone() };
        out.params = vec![0.0; out.slots.iter().filter(|s| s.is_parameterized()).count()];
        out.with_params(alpha)
    }

    pub fn with_params(&self, alpha: &[f64]) -> Result<Ansatz> {
        self.check_len(alpha)?;
        let mut out = self.clone();
        out.params = alpha.to_vec();
        Ok(out)
    }

    /// Slot consuming parameter `i`.
    pub fn param_slot(&self, i: usize) -> Option<&Slot> {
        self.slots.iter().filter(|s| s.is_parameterized()).nth(i)
    }

    /// Index of the first parameter whose gate is not a Pauli rotation.
    pub fn first_shift_incompatible(&self) -> Option<usize> {
        self.slots.iter().filter(|s| s.is_parameterized()).position(|s| !s.is_shift_compatible())
    }

    fn check_len(&self, alpha: &[f64]) -> Result<()> {
        if alpha.len() != self.params.len() {
            return Err(Error::ParameterCount { expected: self.params.len(), found: alpha.len() });
        }
        if let Some(bad) = alpha.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite parameter {bad}")));
        }
        Ok(())
    }

    fn mixer_word(&self) -> PauliString {
        PauliString::from_sparse(self.n, &(0..self.n).map(|q| (q, 'X')).collect::<Vec<_>>())
            .expect("qubits in range")
    }

    /// Concrete circuit `V(α)`. QAOA driver slots become dense `Unitary`
    /// gates.
    pub fn bind(&self, alpha: &[f64]) -> Result<Circuit> {
        self.check_len(alpha)?;
        let mut gates = Vec::with_capacity(self.slots.len());
        let mut next = alpha.iter();
        for slot in &self.slots {
            let gate = match slot {
                Slot::Fixed { gate } => gate.clone(),
                Slot::RotY { qubit } => Gate::RotY { qubit: *qubit, angle: *next.next().unwrap() },
                Slot::RotZ { qubit } => Gate::RotZ { qubit: *qubit, angle: *next.next().unwrap() },
                Slot::Driver => self.driver()?.gate(*next.next().unwrap()),
                Slot::Mixer => Gate::PauliRotation { pauli: self.mixer_word(), angle: 2.0 * next.next().unwrap() },
            };
            gates.push(gate);
        }
        Circuit::new(self.n, gates)
    }

    /// Gate-list serialization of `V(α)`; inverse of [`Ansatz::from_gates`].
    pub fn to_gates(&self, alpha: &[f64]) -> Result<Vec<Gate>> {
        Ok(self.bind(alpha)?.into_gates())
    }

    fn driver(&self) -> Result<&QaoaDriver> {
        self.driver
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("driver slot without a QAOA Hamiltonian".into()))
    }

    /// `V(α)|0…0>`. Driver slots are applied through the cached
    /// eigendecomposition rather than a dense matrix.
    pub fn prepare_state(&self, alpha: &[f64]) -> Result<Statevector> {
        self.check_len(alpha)?;
        let mut state = Statevector::zero(self.n)?;
        let amps = state.amplitudes_mut();
        let mut next = alpha.iter();
        let mut scratch: Vec<Complex64> = Vec::new();
        for slot in &self.slots {
            match slot {
                Slot::Fixed { gate } => gate.apply_masked(amps, 0),
                Slot::RotY { qubit } => Gate::RotY { qubit: *qubit, angle: *next.next().unwrap() }.apply_masked(amps, 0),
                Slot::RotZ { qubit } => Gate::RotZ { qubit: *qubit, angle: *next.next().unwrap() }.apply_masked(amps, 0),
                Slot::Driver => self.driver()?.evolve(*next.next().unwrap(), amps, &mut scratch),
                Slot::Mixer => Gate::PauliRotation { pauli: self.mixer_word(), angle: 2.0 * next.next().unwrap() }
                    .apply_masked(amps, 0),
            }
        }
        Ok(state)
    }

    /// Inserts the identity-compiling block
    /// `RotY(a)_q RotY(b)_{q+1} CZ RotY(c)_q RotY(d)_{q+1} CZ` before slot
    /// `position`, with its four angles set to zero. The stored parameter
    /// vector gains four zeros at the matching offset.
    pub fn insert_identity_block(&self, position: usize, qubit: usize) -> Result<(Ansatz, Growth)> {
        if self.family != Family::Variable {
            return Err(Error::InvalidArgument("only variable ansätze can grow".into()));
        }
        if position > self.slots.len() || qubit + 1 >= self.n {
            return Err(Error::InvalidArgument(format!("cannot insert a block at slot {position} on qubit {qubit}")));
        }
        let cz = Slot::Fixed { gate: Gate::ControlledZ { control: qubit, target: qubit + 1 } };
        let block = [
            Slot::RotY { qubit },
            Slot::RotY { qubit: qubit + 1 },
            cz.clone(),
            Slot::RotY { qubit },
            Slot::RotY { qubit: qubit + 1 },
            cz,
        ];
        let offset = self.slots[..position].iter().filter(|s| s.is_parameterized()).count();
        let mut out = self.clone();
        out.slots.splice(position..position, block);
        out.params.splice(offset..offset, [0.0; GROWTH_BLOCK_SIZE]);
        Ok((out, Growth { slot_position: position, param_offset: offset, qubit }))
    }

    /// Seeded random insertion of the identity-compiling block.
    pub fn grow_variable(&self, seed: u64) -> Result<(Ansatz, Growth)> {
        if self.n < 2 {
            return Err(Error::InvalidArgument("growth needs at least two qubits".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let position = rng.gen_range(0..=self.slots.len());
        let qubit = rng.gen_range(0..self.n - 1);
        self.insert_identity_block(position, qubit)
    }
}
