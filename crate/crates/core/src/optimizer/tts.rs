use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{OptimizerTrace, TerminatedBy};
use crate::error::{Error, Result};
use crate::problem::QlspInstance;

/// How runs are grouped into a time-to-solution figure. Each instance gets
/// `runs_per_instance` groups of `best_of` independent runs; a group
/// scores its fastest successful run, an instance averages its groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TtsProtocol {
    pub runs_per_instance: usize,
    pub instances: usize,
    pub best_of: usize,
}

impl TtsProtocol {
    /// Mean over `runs` runs of a single fixed instance.
    pub fn fixed(runs: usize) -> Self {
        Self { runs_per_instance: runs, instances: 1, best_of: 1 }
    }

    /// Best of `best_of` runs per instance, averaged over instances.
    pub fn random(instances: usize, best_of: usize) -> Self {
        Self { runs_per_instance: 1, instances, best_of }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs_per_instance == 0 || self.instances == 0 || self.best_of == 0 {
            return Err(Error::InvalidArgument("protocol counts must be at least 1".into()));
        }
        Ok(())
    }

    pub fn runs(&self) -> usize {
        self.runs_per_instance * self.instances * self.best_of
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtsResult {
    /// Mean over resolved instances.
    pub mean: Option<f64>,
    /// Median over resolved groups (single runs when `best_of = 1`).
    pub median: Option<f64>,
    pub per_instance: Vec<Option<f64>>,
    pub resolved: usize,
    pub unresolved: usize,
    /// Fraction of individual runs that reached the threshold.
    pub success_rate: f64,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Aggregates run outcomes (`None` = did not reach the threshold),
/// indexed `[instance][group * best_of + run]`. An instance with a group
/// in which no run succeeded is unresolved and excluded from the mean.
pub fn aggregate_tts(runs: &[Vec<Option<f64>>], best_of: usize) -> TtsResult {
    let best_of = best_of.max(1);
    let total: usize = runs.iter().map(Vec::len).sum();
    let successes = runs.iter().flatten().filter(|r| r.is_some()).count();
    let mut groups = Vec::new();
    let per_instance: Vec<Option<f64>> = runs
        .iter()
        .map(|inst| {
            let scores: Vec<Option<f64>> = inst
                .chunks(best_of)
                .map(|g| g.iter().flatten().copied().reduce(f64::min))
                .collect();
            groups.extend(scores.iter().flatten().copied());
            if scores.is_empty() || scores.iter().any(Option::is_none) {
                None
            } else {
                Some(scores.iter().flatten().sum::<f64>() / scores.len() as f64)
            }
        })
        .collect();
    let resolved: Vec<f64> = per_instance.iter().flatten().copied().collect();
    TtsResult {
        mean: (!resolved.is_empty()).then(|| resolved.iter().sum::<f64>() / resolved.len() as f64),
        median: median(groups),
        resolved: resolved.len(),
        unresolved: per_instance.len() - resolved.len(),
        per_instance,
        success_rate: if total == 0 { 0.0 } else { successes as f64 / total as f64 },
    }
}

/// Runs the protocol. `family(i)` builds instance `i`; `run(inst, k)`
/// performs the `k`-th run on it (use `k` to derive the seed). Runs are
/// executed in parallel; the result does not depend on scheduling.
pub fn time_to_solution<F, R>(family: F, protocol: TtsProtocol, run: R) -> Result<TtsResult>
where
    F: Fn(usize) -> Result<QlspInstance> + Sync,
    R: Fn(&QlspInstance, u64) -> Result<OptimizerTrace> + Sync,
{
    protocol.validate()?;
    let per = protocol.runs_per_instance * protocol.best_of;
    let outcomes = (0..protocol.instances)
        .into_par_iter()
        .map(|i| {
            let inst = family(i)?;
            (0..per)
                .into_par_iter()
                .map(|k| {
                    let trace = run(&inst, k as u64)?;
                    Ok((trace.terminated_by == TerminatedBy::Threshold).then_some(trace.evaluations as f64))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate_tts(&outcomes, protocol.best_of))
}

/// Least-squares line `y = slope·x + intercept` with its coefficient of
/// determination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares; needs two or more points with distinct `x`.
/// A perfect fit of constant data reports `r2 = 1`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument(format!("need two or more paired points, got {} and {}", xs.len(), ys.len())));
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidArgument("fit needs at least two distinct x values".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(LinearFit { slope, intercept, r2 })
}
