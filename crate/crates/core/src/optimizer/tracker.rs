use std::time::Instant;

use super::{HistoryEntry, Iterate, OptimizerTrace, TerminatedBy, TerminationRule};
use crate::ansatz::Ansatz;
use crate::certify::epsilon_bound_with;
use crate::cost::{CostEngine, CostValue};
use crate::error::{Error, Result};

/// Why a run stopped.
#[derive(Debug)]
pub(crate) enum Halt {
    Threshold,
    Budget,
    Failed(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Failed(e)
    }
}

struct Best {
    value: CostValue,
    alpha: Vec<f64>,
    ansatz: Ansatz,
}

/// Counts evaluations, keeps the best point and its history, and turns
/// the threshold and budget into early exits.
pub(crate) struct Tracker<'e, 'o> {
    engine: &'e CostEngine<'e>,
    ansatz: Ansatz,
    rule: TerminationRule,
    evaluations: usize,
    best: Option<Best>,
    history: Vec<HistoryEntry>,
    start: Instant,
    observer: Option<&'o mut dyn FnMut(&Iterate)>,
    /// Best point of the current `methods::run` call.
    run_best: Option<(f64, Vec<f64>)>,
}

impl<'e, 'o> Tracker<'e, 'o> {
    pub(crate) fn new(
        engine: &'e CostEngine<'e>,
        ansatz: Ansatz,
        rule: TerminationRule,
        observer: Option<&'o mut dyn FnMut(&Iterate)>,
    ) -> Self {
        Self {
            engine,
            ansatz,
            rule,
            evaluations: 0,
            best: None,
            history: Vec::new(),
            start: Instant::now(),
            observer,
            run_best: None,
        }
    }

    pub(crate) fn ansatz(&self) -> &Ansatz {
        &self.ansatz
    }

    pub(crate) fn set_ansatz(&mut self, a: Ansatz) {
        self.ansatz = a;
        self.run_best = None;
    }

    pub(crate) fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub(crate) fn best_cost(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.value.value)
    }

    pub(crate) fn begin_run(&mut self) {
        self.run_best = None;
    }

    /// Best point seen since the last `begin_run`/`set_ansatz`.
    pub(crate) fn run_best(&self) -> Option<(f64, Vec<f64>)> {
        self.run_best.clone()
    }

    pub(crate) fn evaluate(&mut self, alpha: &[f64]) -> std::result::Result<f64, Halt> {
        Ok(self.evaluate_full(alpha)?.value)
    }

    pub(crate) fn evaluate_full(&mut self, alpha: &[f64]) -> std::result::Result<CostValue, Halt> {
        if self.evaluations >= self.rule.max_evaluations.max(1) {
            return Err(Halt::Budget);
        }
        let value = self.engine.value(self.rule.kind, &self.ansatz.prepare_state(alpha)?)?;
        self.evaluations += 1;
        if !value.value.is_finite() {
            return Err(Halt::Failed(Error::Numerical(format!("cost evaluated to {}", value.value))));
        }
        if self.run_best.as_ref().is_none_or(|(c, _)| value.value < *c) {
            self.run_best = Some((value.value, alpha.to_vec()));
        }
        let accepted = value.value < self.best_cost();
        if accepted {
            self.accept(alpha, value)?;
        }
        if let Some(obs) = self.observer.as_mut() {
            obs(&Iterate { eval_index: self.evaluations, ansatz: &self.ansatz, alpha, value: &value, accepted });
        }
        if accepted && value.value <= super::termination_threshold(&self.rule, value.psi_norm_sq)? {
            return Err(Halt::Threshold);
        }
        Ok(value)
    }

    fn accept(&mut self, alpha: &[f64], value: CostValue) -> Result<()> {
        let r = &self.rule;
        let epsilon_bound = epsilon_bound_with(r.kind, value.value, value.psi_norm_sq, r.kappa, r.n, r.use_tightened)?;
        self.history.push(HistoryEntry {
            eval_index: self.evaluations,
            cost: value.value,
            psi_norm_sq: value.psi_norm_sq,
            epsilon_bound,
            wallclock_ms: self.start.elapsed().as_secs_f64() * 1e3,
        });
        self.best = Some(Best { value, alpha: alpha.to_vec(), ansatz: self.ansatz.clone() });
        Ok(())
    }

    pub(crate) fn finish(
        self,
        method: &str,
        halt: Halt,
        restarts: usize,
        growth_events: Vec<super::GrowthEvent>,
        keep_slots: bool,
    ) -> Result<OptimizerTrace> {
        let terminated_by = match halt {
            Halt::Threshold => TerminatedBy::Threshold,
            Halt::Budget => TerminatedBy::Budget,
            Halt::Failed(e) => return Err(e),
        };
        let best = self.best.ok_or_else(|| Error::Numerical("no cost evaluation completed".into()))?;
        Ok(OptimizerTrace {
            method: method.to_string(),
            kind: self.rule.kind,
            evaluations: self.evaluations,
            history: self.history,
            final_alpha: best.alpha,
            final_cost: best.value.value,
            final_psi_norm_sq: best.value.psi_norm_sq,
            terminated_by,
            restarts,
            growth_events,
            final_slots: keep_slots.then(|| best.ansatz.slots().to_vec()),
        })
    }
}
