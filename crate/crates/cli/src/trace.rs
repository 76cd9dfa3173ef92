//! Trace files.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use proxipoint_core::IterationTrace;

use crate::config::TraceFormat;
use crate::error::{CliError, Result};
use crate::report::{format_float, to_json_string};

/// Write a trace as CSV (`n,coord0,...,step,residual`, where `step` is
/// d(uₙ, uₙ₊₁) and is empty on the last row) or as JSON.
pub fn emit_trace(trace: &IterationTrace, format: TraceFormat, path: &Path) -> Result<()> {
    let io = |e| CliError::io(path, e);
    match format {
        TraceFormat::Json => {
            let mut file = File::create(path).map_err(io)?;
            file.write_all(to_json_string(trace).as_bytes()).map_err(io)
        }
        TraceFormat::Csv => {
            let csv_err = |e: csv::Error| match e.into_kind() {
                csv::ErrorKind::Io(e) => CliError::io(path, e),
                other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
            };
            let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
            let dim = trace.dim();
            let mut header = vec!["n".to_string()];
            header.extend((0..dim).map(|i| format!("coord{i}")));
            header.extend(["step".to_string(), "residual".to_string()]);
            w.write_record(&header).map_err(csv_err)?;
            for (n, u) in trace.iterates.iter().enumerate() {
                let mut row = vec![n.to_string()];
                row.extend(u.coords().iter().map(|&c| format_float(c)));
                row.push(trace.steps.get(n).map(|&s| format_float(s)).unwrap_or_default());
                row.push(trace.residuals.get(n).map(|&r| format_float(r)).unwrap_or_default());
                w.write_record(&row).map_err(csv_err)?;
            }
            w.flush().map_err(io)
        }
    }
}
