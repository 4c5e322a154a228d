//! Classical outer loop: minimize a cost over `α` until the certified
//! threshold is reached or the evaluation budget runs out.

mod methods;
mod tracker;
mod tts;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use tts::{aggregate_tts, linear_fit, time_to_solution, LinearFit, TtsProtocol, TtsResult};

use crate::ansatz::{Ansatz, Family, Growth, Slot};
use crate::cost::{CostEngine, CostKind, CostValue};
use crate::error::{Error, Result};
use crate::problem::QlspInstance;
use tracker::{Halt, Tracker};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminationRule {
    pub target_epsilon: f64,
    pub kind: CostKind,
    pub kappa: f64,
    pub n: usize,
    /// Divide the threshold by `<psi|psi>` for the normalized kinds.
    pub use_tightened: bool,
    pub max_evaluations: usize,
}

impl TerminationRule {
    pub fn new(target_epsilon: f64, kind: CostKind, kappa: f64, n: usize, max_evaluations: usize) -> Self {
        Self { target_epsilon, kind, kappa, n, use_tightened: kind == CostKind::Local, max_evaluations }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 1.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidKappa(self.kappa));
        }
        if !(self.target_epsilon > 0.0 && self.target_epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("target epsilon must lie in (0, 1), got {}", self.target_epsilon)));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        Ok(())
    }
}

/// Cost threshold `γ` below which the trace distance is certified to be at
/// most the target: `ε²/κ²` (global kinds) or `ε²/(nκ²)` (local kinds),
/// divided by `<psi|psi>` for tightened normalized kinds.
pub fn termination_threshold(rule: &TerminationRule, psi_norm_sq: f64) -> Result<f64> {
    rule.validate()?;
    let eps2 = rule.target_epsilon * rule.target_epsilon;
    let mut gamma = eps2 / (rule.kappa * rule.kappa);
    if rule.kind.is_local() {
        gamma /= rule.n as f64;
    }
    if rule.use_tightened && rule.kind.is_normalized() {
        if psi_norm_sq <= 0.0 {
            return Err(Error::VanishingNorm(psi_norm_sq));
        }
        gamma /= psi_norm_sq.min(1.0);
    }
    Ok(gamma)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RandomLineSearch,
    Coordinate,
    GradientDescent,
    Powell,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::RandomLineSearch => "random_line_search",
            Method::Coordinate => "coordinate",
            Method::GradientDescent => "gradient_descent",
            Method::Powell => "powell",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "random_line_search" | "random" => Ok(Method::RandomLineSearch),
            "coordinate" => Ok(Method::Coordinate),
            "gradient_descent" | "gd" => Ok(Method::GradientDescent),
            "powell" => Ok(Method::Powell),
            _ => Err(Error::InvalidArgument(format!("unknown optimizer method {s:?}"))),
        }
    }
}

/// Tunable defaults.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// Evaluations allowed per one-dimensional search.
    pub line_evaluations: usize,
    /// Initial trial step along a search direction.
    pub line_step: f64,
    /// Initial gradient-descent step (radians per unit gradient).
    pub gd_step: f64,
    /// An iteration improving the best cost by less than this relative
    /// amount counts as a stall; stalls trigger a random restart.
    pub stall_tolerance: f64,
    /// Growth is kept only if it lowers the cost by this relative amount.
    pub growth_gain: f64,
    /// Growth attempts before `minimize_variable` stops growing.
    pub max_growths: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            line_evaluations: 32,
            line_step: 0.1,
            gd_step: 0.1,
            stall_tolerance: 1e-6,
            growth_gain: 1e-3,
            max_growths: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminatedBy {
    Threshold,
    Budget,
}

/// One improvement of the best cost seen so far.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    /// 1-based count of evaluations when this value was produced.
    pub eval_index: usize,
    pub cost: f64,
    pub psi_norm_sq: f64,
    pub epsilon_bound: f64,
    pub wallclock_ms: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEvent {
    pub eval_index: usize,
    pub growth: Growth,
    pub accepted: bool,
    pub cost_before: f64,
    pub cost_after: f64,
    pub num_params: usize,
}

/// One evaluated point, handed to observers.
pub struct Iterate<'a> {
    pub eval_index: usize,
    pub ansatz: &'a Ansatz,
    pub alpha: &'a [f64],
    pub value: &'a CostValue,
    /// True when this evaluation improved the best cost so far.
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub method: String,
    pub kind: CostKind,
    pub evaluations: usize,
    pub history: Vec<HistoryEntry>,
    pub final_alpha: Vec<f64>,
    pub final_cost: f64,
    pub final_psi_norm_sq: f64,
    pub terminated_by: TerminatedBy,
    pub restarts: usize,
    pub growth_events: Vec<GrowthEvent>,
    /// Structure belonging to `final_alpha` (variable ansätze only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_slots: Option<Vec<Slot>>,
}

impl OptimizerTrace {
    /// Evaluations needed before the certified bound first reached
    /// `epsilon`, read off the history.
    pub fn evaluations_to_epsilon(&self, epsilon: f64) -> Option<usize> {
        self.history.iter().find(|h| h.epsilon_bound <= epsilon).map(|h| h.eval_index)
    }

    pub fn best_epsilon_bound(&self) -> f64 {
        self.history.last().map_or(1.0, |h| h.epsilon_bound)
    }
}

fn initial_alpha(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

fn check_combo(a: &Ansatz, kind: CostKind, rule: &TerminationRule, inst: &QlspInstance) -> Result<()> {
    rule.validate()?;
    if rule.kind != kind {
        return Err(Error::InvalidArgument(format!("rule is for {} but minimizing {}", rule.kind, kind)));
    }
    if a.num_qubits() != inst.num_qubits() || rule.n != inst.num_qubits() {
        return Err(Error::DimensionMismatch { expected: inst.num_qubits(), found: a.num_qubits() });
    }
    if a.num_params() == 0 {
        return Err(Error::InvalidArgument("ansatz has no parameters".into()));
    }
    Ok(())
}

/// [`minimize_with`] with default options and no observer.
pub fn minimize(
    inst: &QlspInstance,
    a: &Ansatz,
    kind: CostKind,
    method: Method,
    rule: &TerminationRule,
    seed: u64,
) -> Result<OptimizerTrace> {
    minimize_with(inst, a, kind, method, rule, seed, &OptimizerOptions::default(), None)
}

/// Runs `method` from a uniform random start in `[−π, π)`, restarting
/// from a fresh random point whenever an iteration stalls. Every cost
/// evaluation (including shifted ones for gradients) is counted.
#[allow(clippy::too_many_arguments)]
pub fn minimize_with(
    inst: &QlspInstance,
    a: &Ansatz,
    kind: CostKind,
    method: Method,
    rule: &TerminationRule,
    seed: u64,
    options: &OptimizerOptions,
    observer: Option<&mut dyn FnMut(&Iterate)>,
) -> Result<OptimizerTrace> {
    check_combo(a, kind, rule, inst)?;
    let engine = CostEngine::new(inst)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = Tracker::new(&engine, a.clone(), *rule, observer);
    let mut restarts = 0;
    let mut alpha = initial_alpha(&mut rng, a.num_params());
    let halt = loop {
        match methods::run(method, &mut tracker, &mut rng, alpha, options) {
            Ok(methods::Stall) => {
                restarts += 1;
                alpha = initial_alpha(&mut rng, a.num_params());
            }
            Err(h) => break h,
        }
    };
    tracker.finish(method.as_str(), halt, restarts, Vec::new(), false)
}

/// Alternates parameter optimization (the inner loop, run until it
/// stalls) with random insertion of identity-compiling blocks (the outer
/// loop). A growth is kept when the following inner loop lowers the cost
/// by the relative `growth_gain`; otherwise the previous structure and
/// parameters are restored.
pub fn minimize_variable(
    inst: &QlspInstance,
    a: &Ansatz,
    kind: CostKind,
    method: Method,
    rule: &TerminationRule,
    seed: u64,
    options: &OptimizerOptions,
) -> Result<OptimizerTrace> {
    if a.family() != Family::Variable {
        return Err(Error::InvalidArgument("minimize_variable needs a variable ansatz".into()));
    }
    check_combo(a, kind, rule, inst)?;
    let engine = CostEngine::new(inst)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = Tracker::new(&engine, a.clone(), *rule, None);
    let mut events = Vec::new();
    let mut restarts = 0;

    let mut current = a.clone();
    let mut alpha = initial_alpha(&mut rng, a.num_params());
    let halt = 'outer: loop {
        // inner loop on the current structure
        if let Err(h) = methods::run(method, &mut tracker, &mut rng, alpha.clone(), options) {
            break 'outer h;
        }
        let (before, settled) = tracker.run_best().expect("inner loop evaluated at least once");
        alpha = settled;
        let mut grew = false;
        for _ in 0..options.max_growths {
            let (grown, growth) = match current.with_params(&alpha).and_then(|c| c.grow_variable(rng.gen())) {
                Ok(g) => g,
                Err(e) => break 'outer Halt::Failed(e),
            };
            tracker.set_ansatz(grown.clone());
            let outcome = methods::run(method, &mut tracker, &mut rng, grown.params().to_vec(), options);
            let (after, trial) = tracker.run_best().unwrap_or((before, alpha.clone()));
            let accepted = matches!(outcome, Err(Halt::Threshold)) || after < before * (1.0 - options.growth_gain);
            events.push(GrowthEvent {
                eval_index: tracker.evaluations(),
                growth,
                accepted,
                cost_before: before,
                cost_after: after,
                num_params: grown.num_params(),
            });
            if let Err(h) = outcome {
                break 'outer h;
            }
            if accepted {
                current = grown;
                alpha = trial;
                grew = true;
                break;
            }
            tracker.set_ansatz(current.clone());
        }
        if !grew {
            // no useful growth left: restart parameters on the current structure
            restarts += 1;
            alpha = initial_alpha(&mut rng, current.num_params());
        }
    };
    tracker.finish(method.as_str(), halt, restarts, events, true)
}
