//! CSV export of correction traces.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use gpdrep_core::rep::CorrectionTrace;

#[derive(Serialize)]
struct Row {
    iter: usize,
    r_max: f64,
    b_max: f64,
    step_max: f64,
}

/// Columns `iter, r_max, b_max, step_max`, one row per iterate.
pub fn write_trace_to<W: Write>(out: W, trace: &CorrectionTrace) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &trace.rows {
        w.serialize(Row { iter: r.iteration, r_max: r.defect_max, b_max: r.bound_max, step_max: r.step_max })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace(path: &Path, trace: &CorrectionTrace) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    write_trace_to(file, trace).map_err(std::io::Error::other)
}
