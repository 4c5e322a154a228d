use std::path::PathBuf;

use clap::Args;
use vqls::problem::ProblemFile;

use crate::error::CliError;
use crate::output::write_atomic;
use crate::spec::ProblemArgs;

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Destination problem file
    #[arg(long, short)]
    pub output: PathBuf,
}

pub fn run(args: &GenerateArgs) -> Result<u8, CliError> {
    let inst = args.problem.load()?;
    write_atomic(&args.output, &(ProblemFile::from_instance(&inst).to_json()? + "\n"))?;
    println!("{}", serde_json::json!({ "status": "ok", "label": inst.label(), "output": args.output }));
    Ok(0)
}
