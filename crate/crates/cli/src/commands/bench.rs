//! Time-to-solution sweeps driven by a JSON configuration.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use vqls::cost::CostKind;
use vqls::optimizer::{linear_fit, time_to_solution, LinearFit, Method, TerminationRule, TtsProtocol, TtsResult};
use vqls::simulator::DEFAULT_QUBIT_CAP;

use crate::error::CliError;
use crate::spec::{run_optimizer, AnsatzSpec, FamilySpec};

pub const BENCH_HEADER: &str = "# vqls-bench v1";
pub const BENCH_COLUMNS: &str =
    "row,sweep,value,mean_tts,median_tts,success_rate,resolved,unresolved,status,fit_model,fit_slope,fit_intercept,fit_r2";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Kappa,
    Epsilon,
    N,
    /// Pair probability of the random family.
    Random,
}

impl SweepAxis {
    fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Kappa => "kappa",
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::N => "n",
            SweepAxis::Random => "random",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub sweep: SweepAxis,
    pub values: Vec<f64>,
    pub family: FamilySpec,
    /// Values of the axes not being swept.
    pub n: usize,
    pub kappa: f64,
    pub epsilon: f64,
    pub ansatz: AnsatzSpec,
    pub kind: CostKind,
    pub method: Method,
    /// Base seed: instance `i` of the random family uses `seed + i`, run
    /// `k` on an instance uses optimizer seed `seed + k`.
    #[serde(default)]
    pub seed: u64,
    pub protocol: TtsProtocol,
    pub max_evaluations: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// One sweep point's fixed parameters.
#[derive(Clone, Copy, Debug)]
struct Point {
    n: usize,
    kappa: f64,
    epsilon: f64,
    family: FamilySpec,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.values.is_empty() {
            return Err(CliError::config("sweep values are empty"));
        }
        self.protocol.validate()?;
        for &v in &self.values {
            let p = self.point(v)?;
            if p.n < 2 || p.n > DEFAULT_QUBIT_CAP {
                return Err(CliError::config(format!("n = {} outside [2, {DEFAULT_QUBIT_CAP}]", p.n)));
            }
            if !(p.kappa > 1.0 && p.kappa.is_finite()) {
                return Err(CliError::config(format!("kappa = {} must exceed 1", p.kappa)));
            }
            if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
                return Err(CliError::config(format!("epsilon = {} outside (0, 1)", p.epsilon)));
            }
        }
        Ok(())
    }

    fn point(&self, v: f64) -> Result<Point, CliError> {
        let mut p = Point { n: self.n, kappa: self.kappa, epsilon: self.epsilon, family: self.family };
        match self.sweep {
            SweepAxis::Kappa => p.kappa = v,
            SweepAxis::Epsilon => p.epsilon = v,
            SweepAxis::N => {
                if v.fract() != 0.0 || v < 0.0 {
                    return Err(CliError::config(format!("qubit count {v} is not a whole number")));
                }
                p.n = v as usize;
            }
            SweepAxis::Random => match self.family {
                FamilySpec::Random { .. } if (0.0..=1.0).contains(&v) => {
                    p.family = FamilySpec::Random { pair_probability: v }
                }
                FamilySpec::Random { .. } => {
                    return Err(CliError::config(format!("pair probability {v} outside [0, 1]")))
                }
                _ => return Err(CliError::config("the random sweep needs the random family")),
            },
        }
        Ok(p)
    }

    fn run_point(&self, v: f64) -> Result<TtsResult, CliError> {
        let p = self.point(v)?;
        let base = self.seed;
        let out = time_to_solution(
            |i| p.family.build(p.n, p.kappa, base.wrapping_add(i as u64)).map_err(to_core),
            self.protocol,
            |inst, k| {
                let a = self.ansatz.build(inst).map_err(to_core)?;
                let rule = TerminationRule::new(p.epsilon, self.kind, p.kappa, p.n, self.max_evaluations);
                run_optimizer(inst, &a, self.method, &rule, base.wrapping_add(k)).map_err(to_core)
            },
        )?;
        Ok(out)
    }
}

fn to_core(e: CliError) -> vqls::Error {
    match e {
        CliError::Core(e) => e,
        other => vqls::Error::InvalidArgument(other.to_string()),
    }
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Benchmark configuration (JSON)
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV (overrides the configuration's `output`)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Fits reported for the medians: `power` is `ln y` against `ln x`,
/// `log` is `y` against `ln x` and `exp` is `ln y` against `x`. For the
/// epsilon sweep `x` is `1/ε`.
pub fn fits(axis: SweepAxis, points: &[(f64, f64)]) -> Vec<(&'static str, LinearFit)> {
    let xs: Vec<f64> = points.iter().map(|&(v, _)| if axis == SweepAxis::Epsilon { 1.0 / v } else { v }).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let ln = |v: &[f64]| v.iter().map(|x| x.ln()).collect::<Vec<_>>();
    let candidates = [("power", ln(&xs), ln(&ys)), ("log", ln(&xs), ys.clone()), ("exp", xs.clone(), ln(&ys))];
    candidates.into_iter().filter_map(|(name, x, y)| linear_fit(&x, &y).ok().map(|f| (name, f))).collect()
}

pub fn run(args: &BenchArgs) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&args.config)?;
    let config: BenchmarkConfig =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", args.config.display())))?;
    config.validate()?;
    let path = args
        .output
        .clone()
        .or_else(|| config.output.clone())
        .ok_or_else(|| CliError::config("no output path: pass --output or set `output` in the configuration"))?;
    let axis = config.sweep.as_str();
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "{BENCH_HEADER}")?;
    writeln!(w, "{BENCH_COLUMNS}")?;
    w.flush()?;

    let mut medians = Vec::new();
    let mut failed = 0usize;
    for &v in &config.values {
        let row = match config.run_point(v) {
            Ok(r) => {
                let status = match (r.resolved, r.unresolved) {
                    (_, 0) => "ok",
                    (0, _) => "unresolved",
                    _ => "partial",
                };
                if let Some(m) = r.median {
                    medians.push((v, m));
                }
                format!(
                    "point,{axis},{v},{},{},{},{},{},{status},,,,",
                    opt(r.mean),
                    opt(r.median),
                    r.success_rate,
                    r.resolved,
                    r.unresolved
                )
            }
            Err(e) => {
                failed += 1;
                let msg = e.to_string().replace([',', '\n'], ";");
                format!("point,{axis},{v},,,,,,error: {msg},,,,")
            }
        };
        // one complete row per point, flushed before the next point starts
        writeln!(w, "{row}")?;
        w.flush()?;
    }
    for (model, f) in fits(config.sweep, &medians) {
        writeln!(w, "fit,{axis},,,,,,,ok,{model},{},{},{}", f.slope, f.intercept, f.r2)?;
    }
    w.flush()?;
    println!(
        "{}",
        serde_json::json!({ "status": if failed == 0 { "ok" } else { "partial" }, "points": config.values.len(), "failed_points": failed, "output": path })
    );
    Ok(0)
}
