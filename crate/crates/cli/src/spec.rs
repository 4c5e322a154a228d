//! Problem and ansatz descriptions shared by `solve`, `generate` and the
//! benchmark configuration.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use vqls::ansatz::{
    build_hea, build_hea_extended, build_qaoa, build_variable, build_variable_extended, Ansatz, DriverKind, Family,
    QaoaSpec,
};
use vqls::cost::CostKind;
use vqls::optimizer::{minimize, minimize_variable, Method, OptimizerOptions, OptimizerTrace, TerminationRule};
use vqls::problem::{degenerate_qlsp, ising_qlsp, random_qlsp, ProblemFile, QlspInstance, DEFAULT_PAIR_PROBABILITY};

use crate::error::CliError;

/// A generator family and its fixed parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Ising {
        #[serde(default = "default_coupling")]
        j: f64,
    },
    Random {
        #[serde(default = "default_pair_probability")]
        pair_probability: f64,
    },
    Degenerate {
        variant: u8,
    },
}

fn default_coupling() -> f64 {
    0.1
}

fn default_pair_probability() -> f64 {
    DEFAULT_PAIR_PROBABILITY
}

impl FamilySpec {
    /// Instance `index` of the family; only the random family varies with it.
    pub fn build(&self, n: usize, kappa: f64, seed: u64) -> Result<QlspInstance, CliError> {
        Ok(match *self {
            FamilySpec::Ising { j } => ising_qlsp(n, j, kappa)?,
            FamilySpec::Random { pair_probability } => random_qlsp(n, kappa, pair_probability, seed)?,
            FamilySpec::Degenerate { variant } => {
                if n != 3 {
                    return Err(CliError::config(format!("the degenerate family is fixed at 3 qubits, got n = {n}")));
                }
                degenerate_qlsp(variant, kappa)?
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzKind {
    Hea,
    HeaExtended,
    Variable,
    VariableExtended,
    Qaoa,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    #[serde(default = "default_layers")]
    pub layers: usize,
    /// QAOA rounds.
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default = "default_driver")]
    pub driver: CostKind,
    /// QAOA driver scale; defaults to the instance's κ.
    #[serde(default)]
    pub driver_scale: Option<f64>,
}

fn default_layers() -> usize {
    4
}

fn default_rounds() -> usize {
    1
}

fn default_driver() -> CostKind {
    CostKind::LocalHat
}

impl AnsatzSpec {
    pub fn build(&self, inst: &QlspInstance) -> Result<Ansatz, CliError> {
        let n = inst.num_qubits();
        Ok(match self.kind {
            AnsatzKind::Hea => build_hea(n, self.layers)?,
            AnsatzKind::HeaExtended => build_hea_extended(n, self.layers)?,
            AnsatzKind::Variable => build_variable(n, self.layers)?,
            AnsatzKind::VariableExtended => build_variable_extended(n, self.layers)?,
            AnsatzKind::Qaoa => {
                let driver = match self.driver {
                    CostKind::GlobalHat => DriverKind::GlobalHat,
                    CostKind::LocalHat => DriverKind::LocalHat,
                    other => {
                        return Err(CliError::config(format!("QAOA driver must be global-hat or local-hat, got {other}")))
                    }
                };
                let driver_scale = match self.driver_scale {
                    Some(s) => s,
                    None => inst.kappa_or_estimate()?,
                };
                build_qaoa(inst, QaoaSpec { p: self.rounds, driver, driver_scale })?
            }
        })
    }
}

/// Runs the optimizer appropriate to the ansatz family.
pub fn run_optimizer(
    inst: &QlspInstance,
    a: &Ansatz,
    method: Method,
    rule: &TerminationRule,
    seed: u64,
) -> Result<OptimizerTrace, CliError> {
    Ok(if a.family() == Family::Variable {
        minimize_variable(inst, a, rule.kind, method, rule, seed, &OptimizerOptions::default())?
    } else {
        minimize(inst, a, rule.kind, method, rule, seed)?
    })
}

pub fn parse_kind(s: &str) -> Result<CostKind, String> {
    s.parse().map_err(|e: vqls::Error| e.to_string())
}

pub fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: vqls::Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Ising,
    Random,
    Degenerate,
}

/// Where the instance comes from: a problem file or a generator.
#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    /// Problem file (JSON); overrides the generator flags
    #[arg(long, conflicts_with = "family")]
    pub problem: Option<PathBuf>,
    /// Generator family
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    /// Qubit count for generated problems
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Condition number for generated problems
    #[arg(long, default_value_t = 10.0)]
    pub kappa: f64,
    /// Ising coupling J
    #[arg(long, default_value_t = 0.1)]
    pub j: f64,
    /// Pair probability of the random family
    #[arg(long, default_value_t = DEFAULT_PAIR_PROBABILITY)]
    pub pair_probability: f64,
    /// Seed of the random family
    #[arg(long, default_value_t = 0)]
    pub instance_seed: u64,
    /// Degenerate-family variant (1, 2 or 3)
    #[arg(long, default_value_t = 1)]
    pub variant: u8,
}

impl ProblemArgs {
    pub fn load(&self) -> Result<QlspInstance, CliError> {
        if let Some(path) = &self.problem {
            let file = ProblemFile::read(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            return Ok(file.to_instance()?);
        }
        let family = match self.family {
            Some(FamilyName::Ising) => FamilySpec::Ising { j: self.j },
            Some(FamilyName::Random) => FamilySpec::Random { pair_probability: self.pair_probability },
            Some(FamilyName::Degenerate) => FamilySpec::Degenerate { variant: self.variant },
            None => return Err(CliError::config("give either --problem or --family")),
        };
        family.build(self.n, self.kappa, self.instance_seed)
    }
}

#[derive(Args, Debug, Clone)]
pub struct AnsatzArgs {
    /// Trial-circuit family
    #[arg(long, value_enum, default_value = "hea")]
    pub ansatz: AnsatzKind,
    /// Layers of the hardware-efficient (or starting variable) layout
    #[arg(long, default_value_t = 4)]
    pub layers: usize,
    /// QAOA rounds
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    /// QAOA driver Hamiltonian: global-hat or local-hat
    #[arg(long, default_value = "local-hat", value_parser = parse_kind)]
    pub driver: CostKind,
    /// QAOA driver scale (default: the instance's condition number)
    #[arg(long)]
    pub driver_scale: Option<f64>,
}

impl AnsatzArgs {
    pub fn spec(&self) -> AnsatzSpec {
        AnsatzSpec {
            kind: self.ansatz,
            layers: self.layers,
            rounds: self.rounds,
            driver: self.driver,
            driver_scale: self.driver_scale,
        }
    }
}
