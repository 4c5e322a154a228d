use num_complex::Complex64;
use rayon::prelude::*;

use super::estimators::{
    complex_estimate, hadamard_test, overlap_delta, overlap_test, HadamardWork, Part, ShotsUsed,
};
use super::{Backend, CostKind, CostReport, DeltaRoute, ShotConfig, MIN_PSI_NORM_SQ};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, KahanSum};
use crate::problem::QlspInstance;
use crate::simulator::{Circuit, Statevector};

/// Cost value from the fast path, with the pieces the gradient needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostValue {
    pub kind: CostKind,
    pub value: f64,
    /// `<psi|psi>`
    pub psi_norm_sq: f64,
    /// `|<b|psi>|²` (global kinds, else 0)
    pub overlap_sq: f64,
    /// local hat cost (local kinds, else 0)
    pub local_hat: f64,
}

/// Evaluates costs for one instance. Holds `|b>` and `U†` so repeated
/// evaluations only pay for `V`, `A` and (local kinds) `U†`.
#[derive(Clone, Debug)]
pub struct CostEngine<'a> {
    inst: &'a QlspInstance,
    b: Statevector,
    u_inv: Circuit,
}

impl<'a> CostEngine<'a> {
    pub fn new(inst: &'a QlspInstance) -> Result<Self> {
        Ok(Self { inst, b: inst.b_state()?, u_inv: inst.b_prep().inverse() })
    }

    pub fn instance(&self) -> &QlspInstance {
        self.inst
    }

    pub fn b_state(&self) -> &Statevector {
        &self.b
    }

    /// Cost of the normalized trial state `x`, computed as a residual norm
    /// so values near zero keep full relative precision.
    pub fn value(&self, kind: CostKind, x: &Statevector) -> Result<CostValue> {
        let n = self.inst.num_qubits();
        let psi = self.inst.matrix().apply(x)?;
        let psi_norm_sq = psi.norm_sqr();
        if kind.is_normalized() && psi_norm_sq <= MIN_PSI_NORM_SQ {
            return Err(Error::VanishingNorm(psi_norm_sq));
        }
        let mut out = CostValue { kind, value: 0.0, psi_norm_sq, overlap_sq: 0.0, local_hat: 0.0 };
        if kind.is_local() {
            let mut phi = psi;
            self.u_inv.apply_in_place(&mut phi)?;
            let lh: f64 = phi
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(k, a)| a.norm_sqr() * k.count_ones() as f64)
                .sum::<f64>()
                / n as f64;
            out.local_hat = lh;
            out.value = if kind == CostKind::Local { lh / psi_norm_sq } else { lh };
        } else {
            let ov = self.b.inner(&psi)?;
            let resid: f64 = psi
                .amplitudes()
                .iter()
                .zip(self.b.amplitudes())
                .map(|(p, b)| (p - ov * b).norm_sqr())
                .sum();
            out.overlap_sq = ov.norm_sqr();
            out.value = if kind == CostKind::Global { (resid / psi_norm_sq).min(1.0) } else { resid };
        }
        Ok(out)
    }

    pub fn value_of_circuit(&self, kind: CostKind, v: &Circuit) -> Result<CostValue> {
        self.value(kind, &v.prepare()?)
    }

    /// Full report through the chosen backend. Sampled shots always go
    /// through the test circuits, since the direct backend has no
    /// measurement model.
    pub fn report(&self, kind: CostKind, v: &Circuit, backend: Backend, shots: &ShotConfig) -> Result<CostReport> {
        if v.num_qubits() != self.inst.num_qubits() {
            return Err(Error::DimensionMismatch { expected: self.inst.num_qubits(), found: v.num_qubits() });
        }
        match (backend, shots.is_exact()) {
            (Backend::Direct, true) => self.direct_report(kind, &v.prepare()?),
            (Backend::Direct, false) => self.circuit_report(kind, v, DeltaRoute::Split, shots),
            (Backend::Circuit { delta }, _) => self.circuit_report(kind, v, delta, shots),
        }
    }

    /// `A_l|x>` and `U† A_l|x>` for every term.
    fn term_states(&self, x: &Statevector, with_phi: bool) -> Result<Vec<(Statevector, Option<Statevector>)>> {
        let a = self.inst.matrix();
        (0..a.num_terms())
            .into_par_iter()
            .map(|l| {
                let psi = a.apply_term(l, x)?;
                let phi = if with_phi {
                    let mut p = psi.clone();
                    self.u_inv.apply_in_place(&mut p)?;
                    Some(p)
                } else {
                    None
                };
                Ok((psi, phi))
            })
            .collect()
    }

    pub fn direct_report(&self, kind: CostKind, x: &Statevector) -> Result<CostReport> {
        let n = self.inst.num_qubits();
        let ll = self.inst.matrix().num_terms();
        let states = self.term_states(x, kind.is_local())?;
        let pairs: Vec<(usize, usize)> = (0..ll).flat_map(|l| (l..ll).map(move |m| (l, m))).collect();

        let beta_vals: Vec<Complex64> = pairs
            .par_iter()
            .map(|&(l, m)| states[m].0.inner(&states[l].0))
            .collect::<Result<_>>()?;
        let beta = fill_hermitian(ll, &pairs, &beta_vals);

        let gamma = if kind.is_local() {
            None
        } else {
            let g: Vec<Complex64> =
                states.iter().map(|(psi, _)| self.b.inner(psi)).collect::<Result<_>>()?;
            Some(CMatrix::from_fn(ll, ll, |l, m| g[l] * g[m].conj()))
        };

        let delta = if kind.is_local() {
            let mats = (0..n)
                .into_par_iter()
                .map(|j| {
                    let z: Vec<Complex64> = pairs
                        .iter()
                        .map(|&(l, m)| {
                            let (pl, pm) = (states[l].1.as_ref().unwrap(), states[m].1.as_ref().unwrap());
                            z_element(pm.amplitudes(), pl.amplitudes(), j)
                        })
                        .collect();
                    let zm = fill_hermitian(ll, &pairs, &z);
                    (&beta + zm) * Complex64::new(0.5, 0.0)
                })
                .collect();
            Some(mats)
        } else {
            None
        };

        let mut report = CostReport {
            kind,
            value: 0.0,
            psi_norm_sq: 0.0,
            beta,
            gamma,
            delta,
            shots_used: ShotsUsed::Exact,
            std_error: None,
        };
        self.assemble(&mut report, true)?;
        Ok(report)
    }

    fn circuit_report(&self, kind: CostKind, v: &Circuit, route: DeltaRoute, shots: &ShotConfig) -> Result<CostReport> {
        let n = self.inst.num_qubits();
        let terms = self.inst.matrix().terms();
        let ll = terms.len();
        let u = self.inst.b_prep();
        let pairs: Vec<(usize, usize)> = (0..ll).flat_map(|l| (l..ll).map(move |m| (l, m))).collect();

        // β (always needed for <psi|psi>)
        let beta_est = estimate_pairs(&pairs, |l, m, part| {
            let w = HadamardWork::Beta { v, a_l: &terms[l].op, a_lp: &terms[m].op };
            hadamard_test(&w, part, shots, stream_id(0, l, m, 0, part))
        })?;
        let mut used = beta_est.shots;
        let beta = fill_hermitian(ll, &pairs, &beta_est.values);
        let coeffs = self.inst.matrix().coeffs();
        let (_, var_d) = quad_form(&coeffs, &pairs, &beta_est);

        let mut gamma = None;
        let mut delta = None;
        let var_value;
        if kind.is_local() {
            let mut mats = Vec::with_capacity(n);
            let mut var_sum = 0.0;
            for j in 0..n {
                let est = match route {
                    DeltaRoute::Split => estimate_pairs(&pairs, |l, m, part| {
                        let w = HadamardWork::ZTerm { v, a_l: &terms[l].op, a_lp: &terms[m].op, u, j };
                        hadamard_test(&w, part, shots, stream_id(2, l, m, j, part))
                    })?,
                    DeltaRoute::Overlap => estimate_pairs(&pairs, |l, m, part| {
                        overlap_delta(u, v, &terms[l].op, &terms[m].op, j, part, shots, stream_id(3, l, m, j, part))
                    })?,
                };
                used = used.merge(est.shots);
                let (_, var_j) = quad_form(&coeffs, &pairs, &est);
                let raw = fill_hermitian(ll, &pairs, &est.values);
                match route {
                    DeltaRoute::Split => {
                        var_sum += var_j / 4.0;
                        mats.push((&beta + raw) * Complex64::new(0.5, 0.0));
                    }
                    DeltaRoute::Overlap => {
                        var_sum += var_j;
                        mats.push(raw);
                    }
                }
            }
            let nn = (n * n) as f64;
            // split: L̂ = D/2 − (1/2n) Σ_j Z_j ; overlap: L̂ = D − (1/n) Σ_j Δ_j
            var_value = match route {
                DeltaRoute::Split => var_d / 4.0 + var_sum / nn,
                DeltaRoute::Overlap => var_d + var_sum / nn,
            };
            delta = Some(mats);
        } else {
            let est = estimate_pairs(&pairs, |l, m, part| {
                overlap_test(u, v, &terms[l].op, &terms[m].op, part, shots, stream_id(1, l, m, 0, part))
            })?;
            used = used.merge(est.shots);
            let (_, var_g) = quad_form(&coeffs, &pairs, &est);
            var_value = var_d + var_g;
            gamma = Some(fill_hermitian(ll, &pairs, &est.values));
        }

        let mut report = CostReport {
            kind,
            value: 0.0,
            psi_norm_sq: 0.0,
            beta,
            gamma,
            delta,
            shots_used: used,
            std_error: None,
        };
        self.assemble(&mut report, shots.is_exact())?;
        if !shots.is_exact() {
            report.std_error = Some(propagate_std_error(&report, var_value, var_d));
        }
        Ok(report)
    }

    /// Fills `value` and `psi_norm_sq` from the term matrices with
    /// compensated double sums.
    fn assemble(&self, report: &mut CostReport, exact: bool) -> Result<()> {
        let n = self.inst.num_qubits() as f64;
        let coeffs = self.inst.matrix().coeffs();
        let d = weighted_sum(&coeffs, &report.beta).re;
        report.psi_norm_sq = d;
        if report.kind.is_normalized() && d <= MIN_PSI_NORM_SQ {
            return Err(Error::VanishingNorm(d));
        }
        let value = match report.kind {
            CostKind::GlobalHat | CostKind::Global => {
                let g = weighted_sum(&coeffs, report.gamma.as_ref().expect("gamma for global kinds")).re;
                if report.kind == CostKind::GlobalHat {
                    d - g
                } else {
                    1.0 - g / d
                }
            }
            CostKind::LocalHat | CostKind::Local => {
                let mut acc = KahanSum::default();
                for m in report.delta.as_ref().expect("delta for local kinds") {
                    acc.add(weighted_sum(&coeffs, m));
                }
                let lh = d - acc.value().re / n;
                if report.kind == CostKind::LocalHat {
                    lh
                } else {
                    lh / d
                }
            }
        };
        report.value = if exact {
            match report.kind {
                CostKind::Global => value.clamp(0.0, 1.0),
                _ => value.max(0.0),
            }
        } else {
            value
        };
        Ok(())
    }
}

/// `<left|Z_j|right>` on raw amplitudes.
fn z_element(left: &[Complex64], right: &[Complex64], j: usize) -> Complex64 {
    let mut acc = KahanSum::default();
    for (k, (a, b)) in left.iter().zip(right).enumerate() {
        let t = a.conj() * b;
        acc.add(if k >> j & 1 == 1 { -t } else { t });
    }
    acc.value()
}

/// `Σ_{l,l'} c_l c*_{l'} M_{ll'}`.
fn weighted_sum(c: &[Complex64], m: &CMatrix) -> Complex64 {
    let mut acc = KahanSum::default();
    for l in 0..c.len() {
        for lp in 0..c.len() {
            acc.add(c[l] * c[lp].conj() * m[(l, lp)]);
        }
    }
    acc.value()
}

/// Builds a Hermitian matrix from its upper triangle (`pairs` has `l ≤ m`).
fn fill_hermitian(ll: usize, pairs: &[(usize, usize)], vals: &[Complex64]) -> CMatrix {
    let mut m = CMatrix::zeros(ll, ll);
    for (&(l, lp), &v) in pairs.iter().zip(vals) {
        m[(l, lp)] = v;
        m[(lp, l)] = v.conj();
    }
    m
}

struct PairEstimates {
    values: Vec<Complex64>,
    var_re: Vec<f64>,
    var_im: Vec<f64>,
    shots: ShotsUsed,
}

/// Runs `test(l, m, part)` for every upper-triangle pair: real part
/// always, imaginary part off the diagonal (diagonal elements are real).
fn estimate_pairs<F>(pairs: &[(usize, usize)], test: F) -> Result<PairEstimates>
where
    F: Fn(usize, usize, Part) -> Result<super::Estimate> + Sync,
{
    let results: Vec<(Complex64, f64, f64, ShotsUsed)> = pairs
        .par_iter()
        .map(|&(l, m)| {
            let re = test(l, m, Part::Real)?;
            let im = if l == m { None } else { Some(test(l, m, Part::Imag)?) };
            Ok(complex_estimate(re, im))
        })
        .collect::<Result<_>>()?;
    let mut out = PairEstimates { values: Vec::new(), var_re: Vec::new(), var_im: Vec::new(), shots: ShotsUsed::Exact };
    for (v, vr, vi, s) in results {
        out.values.push(v);
        out.var_re.push(vr);
        out.var_im.push(vi);
        out.shots = out.shots.merge(s);
    }
    Ok(out)
}

/// Value and variance of `Σ_{l,l'} c_l c*_{l'} M_{ll'}` when the upper
/// triangle is estimated independently.
fn quad_form(c: &[Complex64], pairs: &[(usize, usize)], est: &PairEstimates) -> (f64, f64) {
    let (mut val, mut var) = (0.0, 0.0);
    for (i, &(l, m)) in pairs.iter().enumerate() {
        let w = c[l] * c[m].conj();
        if l == m {
            val += w.re * est.values[i].re;
            var += w.re * w.re * est.var_re[i];
        } else {
            val += 2.0 * (w * est.values[i]).re;
            var += 4.0 * (w.re * w.re * est.var_re[i] + w.im * w.im * est.var_im[i]);
        }
    }
    (val, var)
}

/// Standard error of the reported value from the variance of the hat form
/// and of `<psi|psi>`.
fn propagate_std_error(report: &CostReport, var_hat: f64, var_d: f64) -> f64 {
    let d = report.psi_norm_sq;
    match report.kind {
        CostKind::GlobalHat | CostKind::LocalHat => var_hat.sqrt(),
        // C = H/D with H the hat value: var ≈ var_H/D² + H² var_D/D⁴
        CostKind::Global | CostKind::Local => {
            let h = report.value * d;
            (var_hat / (d * d) + h * h * var_d / d.powi(4)).sqrt()
        }
    }
}

/// Distinct generator stream per estimated quantity.
fn stream_id(tag: u64, l: usize, m: usize, j: usize, part: Part) -> u64 {
    let p = matches!(part, Part::Imag) as u64;
    ((((tag << 8) | j as u64) << 12 | l as u64) << 12 | m as u64) << 1 | p
}

fn check_term(inst: &QlspInstance, l: usize) -> Result<()> {
    let ll = inst.matrix().num_terms();
    if l >= ll {
        return Err(Error::InvalidArgument(format!("term index {l} out of range for {ll} terms")));
    }
    Ok(())
}

/// `β_{ll'} = <0|V† A_{l'}† A_l V|0>`.
pub fn beta_term(inst: &QlspInstance, v: &Circuit, l: usize, lp: usize) -> Result<Complex64> {
    check_term(inst, l)?;
    check_term(inst, lp)?;
    let x = v.prepare()?;
    let a = inst.matrix();
    a.apply_term(lp, &x)?.inner(&a.apply_term(l, &x)?)
}

/// `γ_{ll'} = <0|U† A_l V|0> <0|V† A_{l'}† U|0>`.
pub fn gamma_term(inst: &QlspInstance, v: &Circuit, l: usize, lp: usize) -> Result<Complex64> {
    check_term(inst, l)?;
    check_term(inst, lp)?;
    let x = v.prepare()?;
    let b = inst.b_state()?;
    let a = inst.matrix();
    Ok(b.inner(&a.apply_term(l, &x)?)? * b.inner(&a.apply_term(lp, &x)?)?.conj())
}

/// `δ^{(j)}_{ll'} = <0|V† A_{l'}† U (|0_j><0_j| ⊗ I) U† A_l V|0>`, through
/// the split `(β_{ll'} + <Z_j element>)/2`.
pub fn delta_term(inst: &QlspInstance, v: &Circuit, l: usize, lp: usize, j: usize) -> Result<Complex64> {
    check_term(inst, l)?;
    check_term(inst, lp)?;
    let n = inst.num_qubits();
    if j >= n {
        return Err(Error::QubitOutOfRange { qubit: j, n });
    }
    let x = v.prepare()?;
    let a = inst.matrix();
    let u_inv = inst.b_prep().inverse();
    let mut pl = a.apply_term(l, &x)?;
    let mut pm = a.apply_term(lp, &x)?;
    let beta = pm.inner(&pl)?;
    u_inv.apply_in_place(&mut pl)?;
    u_inv.apply_in_place(&mut pm)?;
    Ok((beta + z_element(pm.amplitudes(), pl.amplitudes(), j)) * 0.5)
}

/// One-shot convenience wrapper around [`CostEngine::report`].
pub fn evaluate_cost(
    inst: &QlspInstance,
    v: &Circuit,
    kind: CostKind,
    backend: Backend,
    shots: &ShotConfig,
) -> Result<CostReport> {
    CostEngine::new(inst)?.report(kind, v, backend, shots)
}
