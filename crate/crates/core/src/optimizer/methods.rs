use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::tracker::{Halt, Tracker};
use super::{Method, OptimizerOptions};
use crate::gradient::{combine_shifted, FALLBACK_STEP};

type Step<T> = std::result::Result<T, Halt>;

/// The method stopped making progress; the caller decides what next.
pub(crate) struct Stall;

const GOLDEN: f64 = 0.381_966_011_250_105_1;
const X_TOL: f64 = 1e-9;
const BRENT_TOL: f64 = 1e-8;

fn along(base: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    base.iter().zip(dir).map(|(b, d)| b + t * d).collect()
}

fn stalled(before: f64, after: f64, tol: f64) -> bool {
    after >= before - tol * before.abs()
}

/// Golden-section refinement of a bracket `a < b < c` whose best known
/// point is `b`. Stops after `budget` evaluations or when the bracket
/// collapses.
fn golden<F>(mut f: F, (mut a, mut b, mut c): (f64, f64, f64), mut fb: f64, budget: usize) -> Step<(f64, f64)>
where
    F: FnMut(f64) -> Step<f64>,
{
    for _ in 0..budget {
        if c - a <= X_TOL * (1.0 + b.abs()) {
            break;
        }
        let x = if c - b > b - a { b + GOLDEN * (c - b) } else { b - GOLDEN * (b - a) };
        let fx = f(x)?;
        if fx < fb {
            if x > b {
                a = b;
            } else {
                c = b;
            }
            b = x;
            fb = fx;
        } else if x > b {
            c = x;
        } else {
            a = x;
        }
    }
    Ok((b, fb))
}

/// Brent's parabolic-interpolation minimizer on a bracket `a < b < c`
/// whose best known point is `b`, falling back to golden steps when the
/// parabola misbehaves.
fn brent<F>(mut f: F, (a, b, c): (f64, f64, f64), fb: f64, budget: usize) -> Step<(f64, f64)>
where
    F: FnMut(f64) -> Step<f64>,
{
    let (mut lo, mut hi) = (a, c);
    let (mut x, mut w, mut v) = (b, b, b);
    let (mut fx, mut fw, mut fv) = (fb, fb, fb);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..budget {
        let mid = 0.5 * (lo + hi);
        let tol1 = BRENT_TOL * x.abs() + 1e-10;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (hi - lo) {
            break;
        }
        let mut golden_step = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (lo - x) && p < q * (hi - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = if mid >= x { tol1 } else { -tol1 };
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x >= mid { lo - x } else { hi - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Ok((x, fx))
}

#[derive(Clone, Copy)]
enum Refine {
    Golden,
    Brent,
}

/// Minimizes `t ↦ f(base + t·dir)` given `f(base) = f0`: a doubling
/// bracket search from `±step`, then golden section (or Brent), `budget`
/// evaluations in total.
fn line_search(
    tr: &mut Tracker,
    base: &[f64],
    dir: &[f64],
    f0: f64,
    step: f64,
    budget: usize,
) -> Step<(f64, f64)> {
    line_search_with(tr, base, dir, f0, step, budget, Refine::Golden)
}

fn line_search_with(
    tr: &mut Tracker,
    base: &[f64],
    dir: &[f64],
    f0: f64,
    step: f64,
    budget: usize,
    refine: Refine,
) -> Step<(f64, f64)> {
    let mut used = 0;
    let mut f = |t: f64| {
        used += 1;
        tr.evaluate(&along(base, dir, t))
    };
    let f1 = f(step)?;
    let (bracket, fb) = if f1 < f0 {
        expand(&mut f, step, f1, budget)?
    } else {
        let fm = f(-step)?;
        if fm < f0 {
            let ((a, b, c), fb) = expand(&mut |t| f(-t), step, fm, budget)?;
            ((-c, -b, -a), fb)
        } else {
            ((-step, 0.0, step), f0)
        }
    };
    let spent = used;
    let remaining = budget.saturating_sub(spent);
    let f = |t| tr.evaluate(&along(base, dir, t));
    match refine {
        Refine::Golden => golden(f, bracket, fb, remaining),
        Refine::Brent => brent(f, bracket, fb, remaining),
    }
}

/// Doubles `t` while the cost keeps falling. Returns a bracket
/// `(t_prev, t, 2t)`, or the last point if the budget runs out first.
fn expand<F>(f: &mut F, step: f64, f1: f64, budget: usize) -> Step<((f64, f64, f64), f64)>
where
    F: FnMut(f64) -> Step<f64>,
{
    let (mut prev, mut t, mut ft) = (0.0, step, f1);
    for _ in 0..budget.saturating_sub(2) {
        let next = 2.0 * t;
        let fnext = f(next)?;
        if fnext >= ft {
            return Ok(((prev, t, next), ft));
        }
        prev = t;
        t = next;
        ft = fnext;
    }
    Ok(((t, t, t), ft))
}

fn random_direction(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub(crate) fn run(
    method: Method,
    tr: &mut Tracker,
    rng: &mut ChaCha8Rng,
    alpha: Vec<f64>,
    opt: &OptimizerOptions,
) -> Step<Stall> {
    tr.begin_run();
    match method {
        Method::RandomLineSearch => random_line_search(tr, rng, alpha, opt),
        Method::Coordinate => coordinate(tr, alpha, opt),
        Method::GradientDescent => gradient_descent(tr, alpha, opt),
        Method::Powell => powell(tr, alpha, opt),
    }
}

fn random_line_search(tr: &mut Tracker, rng: &mut ChaCha8Rng, mut alpha: Vec<f64>, opt: &OptimizerOptions) -> Step<Stall> {
    let mut f = tr.evaluate(&alpha)?;
    let window = alpha.len().max(10);
    let mut step = opt.line_step;
    loop {
        let f_window = f;
        for _ in 0..window {
            let dir = random_direction(rng, alpha.len());
            let (t, ft) = line_search(tr, &alpha, &dir, f, step, opt.line_evaluations)?;
            if ft < f {
                alpha = along(&alpha, &dir, t);
                f = ft;
                step = t.abs().clamp(1e-6, 1.0);
            }
        }
        if stalled(f_window, f, opt.stall_tolerance) {
            return Ok(Stall);
        }
    }
}

fn coordinate(tr: &mut Tracker, mut alpha: Vec<f64>, opt: &OptimizerOptions) -> Step<Stall> {
    let mut f = tr.evaluate(&alpha)?;
    let pi = std::f64::consts::PI;
    loop {
        let f_sweep = f;
        for i in 0..alpha.len() {
            let base = alpha.clone();
            let (t, ft) = golden(
                |t| {
                    let mut a = base.clone();
                    a[i] += t;
                    tr.evaluate(&a)
                },
                (-pi, 0.0, pi),
                f,
                opt.line_evaluations,
            )?;
            if ft < f {
                alpha[i] += t;
                f = ft;
            }
        }
        if stalled(f_sweep, f, opt.stall_tolerance) {
            return Ok(Stall);
        }
    }
}

fn powell(tr: &mut Tracker, mut alpha: Vec<f64>, opt: &OptimizerOptions) -> Step<Stall> {
    let dim = alpha.len();
    let mut dirs: Vec<Vec<f64>> = (0..dim)
        .map(|k| (0..dim).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut steps = vec![opt.line_step; dim];
    let mut f = tr.evaluate(&alpha)?;
    loop {
        let (start, f_start) = (alpha.clone(), f);
        let (mut biggest, mut biggest_drop) = (0, 0.0);
        for k in 0..dim {
            let (t, ft) = line_search_with(tr, &alpha, &dirs[k], f, steps[k], opt.line_evaluations, Refine::Brent)?;
            if ft < f {
                alpha = along(&alpha, &dirs[k], t);
                steps[k] = t.abs().clamp(1e-6, 1.0);
                if f - ft > biggest_drop {
                    biggest = k;
                    biggest_drop = f - ft;
                }
                f = ft;
            } else {
                steps[k] = (steps[k] * 0.5).max(1e-6);
            }
        }
        if stalled(f_start, f, opt.stall_tolerance) {
            return Ok(Stall);
        }
        let shift: Vec<f64> = alpha.iter().zip(&start).map(|(a, s)| a - s).collect();
        let norm = shift.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 0.0 {
            continue;
        }
        let extrapolated: Vec<f64> = alpha.iter().zip(&start).map(|(a, s)| 2.0 * a - s).collect();
        let f_ext = tr.evaluate(&extrapolated)?;
        if f_ext >= f_start {
            continue;
        }
        let crit = 2.0 * (f_start - 2.0 * f + f_ext) * (f_start - f - biggest_drop).powi(2)
            - biggest_drop * (f_start - f_ext).powi(2);
        if crit < 0.0 {
            let dir: Vec<f64> = shift.iter().map(|x| x / norm).collect();
            let (t, ft) = line_search_with(tr, &alpha, &dir, f, norm.min(1.0), opt.line_evaluations, Refine::Brent)?;
            if ft < f {
                alpha = along(&alpha, &dir, t);
                f = ft;
            }
            dirs[biggest] = dirs[dim - 1].clone();
            steps[biggest] = steps[dim - 1];
            dirs[dim - 1] = dir;
            steps[dim - 1] = norm.min(1.0);
        }
    }
}

fn gradient_descent(tr: &mut Tracker, mut alpha: Vec<f64>, opt: &OptimizerOptions) -> Step<Stall> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut at = tr.evaluate_full(&alpha)?;
    let mut eta = opt.gd_step;
    let mut slow = 0;
    loop {
        let mut grad = Vec::with_capacity(alpha.len());
        for i in 0..alpha.len() {
            let shift_ok = tr.ansatz().param_slot(i).is_some_and(|s| s.is_shift_compatible());
            let h = if shift_ok { half_pi } else { FALLBACK_STEP };
            let mut a = alpha.clone();
            a[i] += h;
            let plus = tr.evaluate_full(&a)?;
            a[i] -= 2.0 * h;
            let minus = tr.evaluate_full(&a)?;
            grad.push(if shift_ok {
                combine_shifted(at.kind, &at, &plus, &minus)
            } else {
                (plus.value - minus.value) / (2.0 * h)
            });
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm.is_nan() || gnorm <= 1e-14 {
            return Ok(Stall);
        }
        let before = at.value;
        loop {
            let trial: Vec<f64> = alpha.iter().zip(&grad).map(|(a, g)| a - eta * g).collect();
            let v = tr.evaluate_full(&trial)?;
            if v.value < at.value {
                alpha = trial;
                at = v;
                eta *= 2.0;
                break;
            }
            eta *= 0.5;
            if eta * gnorm < 1e-12 {
                return Ok(Stall);
            }
        }
        slow = if stalled(before, at.value, opt.stall_tolerance) { slow + 1 } else { 0 };
        if slow >= 20 {
            return Ok(Stall);
        }
    }
}
