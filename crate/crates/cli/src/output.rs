use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use vqls::optimizer::OptimizerTrace;

pub const TRACE_HEADER: &str = "# vqls-trace v1";
pub const TRACE_COLUMNS: &str = "eval_index,cost,psi_norm_sq,epsilon_bound,wallclock_ms";

/// One row per accepted iterate. With `wallclock = false` the timing column
/// is written as 0 so the file is reproducible bit for bit.
pub fn write_trace(path: &Path, trace: &OptimizerTrace, wallclock: bool) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{TRACE_HEADER}")?;
    writeln!(w, "{TRACE_COLUMNS}")?;
    for h in &trace.history {
        let ms = if wallclock { h.wallclock_ms } else { 0.0 };
        writeln!(w, "{},{},{},{},{}", h.eval_index, h.cost, h.psi_norm_sq, h.epsilon_bound, ms)?;
    }
    w.flush()
}

/// Writes `text` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}
