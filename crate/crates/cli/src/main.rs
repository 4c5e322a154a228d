//! Command-line harness for the variational linear-system solver.

mod commands;
mod error;
mod output;
mod spec;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "vqls", version, about = "Variational linear-system solver on a simulated statevector backend")]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimize one instance; writes a trace CSV and a certificate
    Solve(commands::solve::SolveArgs),
    /// Run a time-to-solution sweep from a configuration file
    Bench(commands::bench::BenchArgs),
    /// Turn a sparse Hermitian matrix into a four-term LCU problem file
    Decompose(commands::decompose::DecomposeArgs),
    /// Re-check a certificate against a problem file
    Verify(commands::verify::VerifyArgs),
    /// Write a generated instance as a problem file
    Generate(commands::generate::GenerateArgs),
}

fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::config(e.to_string()))?;
    }
    match &cli.command {
        Command::Solve(a) => commands::solve::run(a),
        Command::Bench(a) => commands::bench::run(a),
        Command::Decompose(a) => commands::decompose::run(a),
        Command::Verify(a) => commands::verify::run(a),
        Command::Generate(a) => commands::generate::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { error::EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "status": e.reason(), "message": e.to_string() }));
            ExitCode::from(e.exit_code())
        }
    }
}
