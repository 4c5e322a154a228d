use std::path::PathBuf;

use clap::Args;
use vqls::certify::Certificate;
use vqls::problem::ProblemFile;

use crate::error::{CliError, EXIT_NUMERICAL};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Problem file the certificate claims to solve
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub certificate: PathBuf,
    /// Allowed deviation of the recomputed cost
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

/// Exit 0 when the certificate checks out, 4 when it does not.
pub fn run(args: &VerifyArgs) -> Result<u8, CliError> {
    let inst = ProblemFile::read(&args.problem)
        .map_err(|e| CliError::config(format!("{}: {e}", args.problem.display())))?
        .to_instance()?;
    let text = std::fs::read_to_string(&args.certificate)?;
    let cert = Certificate::from_json(&text).map_err(|e| CliError::config(format!("{}: {e}", args.certificate.display())))?;
    let v = cert.verify(&inst, args.tol)?;
    println!("{}", serde_json::json!({ "status": if v.passed() { "ok" } else { "mismatch" }, "verification": v }));
    Ok(if v.passed() { 0 } else { EXIT_NUMERICAL })
}
