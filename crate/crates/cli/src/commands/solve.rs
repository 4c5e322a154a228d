use std::path::PathBuf;

use clap::Args;
use serde_json::json;
use vqls::certify::Certificate;
use vqls::cost::CostKind;
use vqls::optimizer::{Method, TerminatedBy, TerminationRule};
use vqls::simulator::PauliString;

use crate::error::{CliError, EXIT_BUDGET};
use crate::output::{write_atomic, write_trace};
use crate::spec::{parse_kind, parse_method, run_optimizer, AnsatzArgs, ProblemArgs};

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    /// Cost to minimize: global-hat, global, local-hat or local
    #[arg(long, default_value = "local", value_parser = parse_kind)]
    pub kind: CostKind,
    /// random_line_search, coordinate, gradient_descent or powell
    #[arg(long, default_value = "powell", value_parser = parse_method)]
    pub method: Method,
    /// Target trace-distance guarantee
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    /// Cost-evaluation budget
    #[arg(long, default_value_t = 100_000)]
    pub max_evals: usize,
    /// Optimizer seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Condition number used for the guarantee (default: instance metadata or dense estimate)
    #[arg(long)]
    pub kappa_bound: Option<f64>,
    /// Use the plain bound even for the local cost
    #[arg(long)]
    pub untightened: bool,
    /// Pauli words reported on the certificate (default: Z on every qubit)
    #[arg(long = "observable")]
    pub observables: Vec<String>,
    #[arg(long, default_value = "trace.csv")]
    pub trace: PathBuf,
    #[arg(long, default_value = "certificate.json")]
    pub certificate: PathBuf,
    /// Write 0 in the wallclock column for reproducible traces
    #[arg(long)]
    pub no_wallclock: bool,
}

pub fn run(args: &SolveArgs) -> Result<u8, CliError> {
    let inst = args.problem.load()?;
    let n = inst.num_qubits();
    let a = args.ansatz.spec().build(&inst)?;
    let kappa = match args.kappa_bound {
        Some(k) => k,
        None => inst.kappa_or_estimate()?,
    };
    let mut rule = TerminationRule::new(args.epsilon, args.kind, kappa, n, args.max_evals);
    if args.untightened {
        rule.use_tightened = false;
    }
    rule.validate()?;
    let observables = if args.observables.is_empty() {
        (0..n).map(|q| PauliString::from_sparse(n, &[(q, 'Z')])).collect::<vqls::Result<Vec<_>>>()?
    } else {
        args.observables.iter().map(|w| w.parse::<PauliString>()).collect::<vqls::Result<Vec<_>>>()?
    };
    if let Some(bad) = observables.iter().find(|p| p.num_qubits() != n) {
        return Err(CliError::config(format!("observable {bad} does not act on {n} qubits")));
    }

    let trace = run_optimizer(&inst, &a, args.method, &rule, args.seed)?;
    write_trace(&args.trace, &trace, !args.no_wallclock)?;

    let solved = match &trace.final_slots {
        Some(slots) => a.with_slots(slots.clone(), &trace.final_alpha)?,
        None => a.with_params(&trace.final_alpha)?,
    };
    let x = solved.prepare_state(&trace.final_alpha)?;
    let cert = Certificate::new(
        args.kind,
        trace.final_cost,
        trace.final_psi_norm_sq,
        kappa,
        &x,
        &observables,
        rule.use_tightened,
    )?
    .with_solution(solved.to_gates(&trace.final_alpha)?);
    write_atomic(&args.certificate, &(cert.to_json()? + "\n"))?;

    let status = match trace.terminated_by {
        TerminatedBy::Threshold => "threshold",
        TerminatedBy::Budget => "budget",
    };
    let summary = json!({
        "status": status,
        "evaluations": trace.evaluations,
        "restarts": trace.restarts,
        "final_cost": trace.final_cost,
        "epsilon_upper": cert.epsilon_upper,
        "trace": args.trace,
        "certificate": args.certificate,
    });
    println!("{summary}");
    Ok(if trace.terminated_by == TerminatedBy::Threshold { 0 } else { EXIT_BUDGET })
}
