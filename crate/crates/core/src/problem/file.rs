use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lcu::{LcuMatrix, LcuTerm, TermOp};
use super::QlspInstance;
use crate::error::{Error, Result};
use crate::simulator::{Circuit, Gate, PauliString};

/// One term of the on-disk LCU: either a Pauli word or an explicit gate
/// list, with the coefficient stored as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TermSpec {
    Pauli { coeff: [f64; 2], pauli_word: PauliString },
    Gates { coeff: [f64; 2], gates: Vec<Gate> },
}

/// The JSON problem description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub terms: Vec<TermSpec>,
    pub b_prep: Vec<Gate>,
    pub kappa: Option<f64>,
    #[serde(default)]
    pub label: String,
}

impl ProblemFile {
    pub fn from_instance(inst: &QlspInstance) -> Self {
        let terms = inst
            .matrix()
            .terms()
            .iter()
            .map(|t| {
                let coeff = [t.coeff.re, t.coeff.im];
                match &t.op {
                    TermOp::Pauli(p) => TermSpec::Pauli { coeff, pauli_word: *p },
                    TermOp::Circuit(c) => TermSpec::Gates { coeff, gates: c.gates().to_vec() },
                }
            })
            .collect();
        Self {
            n: inst.num_qubits(),
            terms,
            b_prep: inst.b_prep().gates().to_vec(),
            kappa: inst.kappa(),
            label: inst.label().to_string(),
        }
    }

    pub fn to_instance(&self) -> Result<QlspInstance> {
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                TermSpec::Pauli { coeff, pauli_word } => {
                    if pauli_word.num_qubits() != self.n {
                        return Err(Error::MalformedPauli(pauli_word.to_string()));
                    }
                    Ok(LcuTerm { coeff: Complex64::new(coeff[0], coeff[1]), op: TermOp::Pauli(*pauli_word) })
                }
                TermSpec::Gates { coeff, gates } => Ok(LcuTerm {
                    coeff: Complex64::new(coeff[0], coeff[1]),
                    op: TermOp::Circuit(Circuit::new(self.n, gates.clone())?),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        QlspInstance::new(
            LcuMatrix::new(self.n, terms)?,
            Circuit::new(self.n, self.b_prep.clone())?,
            self.kappa,
            self.label.clone(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}
