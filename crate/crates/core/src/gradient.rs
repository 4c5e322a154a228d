//! Cost gradients: the ±π/2 shift rule for Pauli-rotation parameters and
//! central differences as an oracle and fallback.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::Ansatz;
use crate::cost::{CostEngine, CostKind, CostValue};
use crate::error::{Error, Result};
use crate::problem::QlspInstance;

/// One partial derivative per ansatz parameter (cost per radian).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientVector {
    pub values: Vec<f64>,
}

impl GradientVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &GradientVector) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Step used for parameters that fall back to central differences.
pub const FALLBACK_STEP: f64 = 1e-5;

fn shifted(alpha: &[f64], i: usize, delta: f64) -> Vec<f64> {
    let mut a = alpha.to_vec();
    a[i] += delta;
    a
}

fn eval(engine: &CostEngine, a: &Ansatz, kind: CostKind, alpha: &[f64]) -> Result<CostValue> {
    engine.value(kind, &a.prepare_state(alpha)?)
}

/// Derivative from the two shifted evaluations. The hat costs are
/// quadratic forms in `|x>`, so half the difference is exact; the
/// normalized costs are ratios of two such forms and take the quotient
/// rule.
pub(crate) fn combine_shifted(kind: CostKind, at: &CostValue, plus: &CostValue, minus: &CostValue) -> f64 {
    let d = at.psi_norm_sq;
    let dd = 0.5 * (plus.psi_norm_sq - minus.psi_norm_sq);
    match kind {
        CostKind::GlobalHat | CostKind::LocalHat => 0.5 * (plus.value - minus.value),
        CostKind::Global => {
            let dn = 0.5 * (plus.overlap_sq - minus.overlap_sq);
            -(dn * d - at.overlap_sq * dd) / (d * d)
        }
        CostKind::Local => {
            let dl = 0.5 * (plus.local_hat - minus.local_hat);
            (dl * d - at.local_hat * dd) / (d * d)
        }
    }
}

fn central(engine: &CostEngine, a: &Ansatz, kind: CostKind, alpha: &[f64], i: usize, h: f64) -> Result<f64> {
    let p = eval(engine, a, kind, &shifted(alpha, i, h))?.value;
    let m = eval(engine, a, kind, &shifted(alpha, i, -h))?.value;
    Ok((p - m) / (2.0 * h))
}

/// Shift-rule gradient against a prepared engine. With `fallback`,
/// parameters that are not Pauli rotations use central differences with
/// [`FALLBACK_STEP`]; without it they are an error.
pub fn gradient_with_engine(
    engine: &CostEngine,
    a: &Ansatz,
    alpha: &[f64],
    kind: CostKind,
    fallback: bool,
) -> Result<GradientVector> {
    if alpha.len() != a.num_params() {
        return Err(Error::ParameterCount { expected: a.num_params(), found: alpha.len() });
    }
    if !fallback {
        if let Some(i) = a.first_shift_incompatible() {
            return Err(Error::NotShiftCompatible(i));
        }
    }
    let at = eval(engine, a, kind, alpha)?;
    let values = (0..alpha.len())
        .into_par_iter()
        .map(|i| {
            if a.param_slot(i).is_some_and(|s| s.is_shift_compatible()) {
                let plus = eval(engine, a, kind, &shifted(alpha, i, FRAC_PI_2))?;
                let minus = eval(engine, a, kind, &shifted(alpha, i, -FRAC_PI_2))?;
                Ok(combine_shifted(kind, &at, &plus, &minus))
            } else {
                central(engine, a, kind, alpha, i, FALLBACK_STEP)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GradientVector { values })
}

/// Analytic gradient; fails on parameters outside the shift rule.
pub fn analytic_gradient(inst: &QlspInstance, a: &Ansatz, alpha: &[f64], kind: CostKind) -> Result<GradientVector> {
    gradient_with_engine(&CostEngine::new(inst)?, a, alpha, kind, false)
}

/// Central differences `(C(α + h e_i) − C(α − h e_i)) / 2h`.
pub fn finite_difference_gradient(
    inst: &QlspInstance,
    a: &Ansatz,
    alpha: &[f64],
    kind: CostKind,
    h: f64,
) -> Result<GradientVector> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")));
    }
    if alpha.len() != a.num_params() {
        return Err(Error::ParameterCount { expected: a.num_params(), found: alpha.len() });
    }
    let engine = CostEngine::new(inst)?;
    let values = (0..alpha.len())
        .into_par_iter()
        .map(|i| central(&engine, a, kind, alpha, i, h))
        .collect::<Result<Vec<f64>>>()?;
    Ok(GradientVector { values })
}
