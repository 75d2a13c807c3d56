//! CSV artifacts.

use std::path::Path;

use qracvqc::{Error, Result};

use crate::experiment::Summary;
use crate::metrics::mean_std;

/// Columns `iteration, fold_1..fold_k, mean, std`. Shorter traces repeat
/// their final value.
pub fn emit_losscurve(traces: &[Vec<f64>], path: &Path) -> Result<()> {
    if traces.is_empty() || traces.iter().any(|t| t.is_empty()) {
        return Err(Error::Argument("loss curve needs at least one nonempty trace".into()));
    }
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["iteration".to_string()];
    header.extend((1..=traces.len()).map(|k| format!("fold_{k}")));
    header.extend(["mean".to_string(), "std".to_string()]);
    w.write_record(&header)?;
    let len = traces.iter().map(Vec::len).max().unwrap_or(0);
    for i in 0..len {
        let row: Vec<f64> = traces.iter().map(|t| t[i.min(t.len() - 1)]).collect();
        let (m, s) = mean_std(&row);
        let mut rec = vec![(i + 1).to_string()];
        rec.extend(row.iter().map(|v| format!("{v:.10}")));
        rec.extend([format!("{m:.10}"), format!("{s:.10}")]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub const TABLE_HEADER: [&str; 10] =
    ["dataset", "encoding", "qubits", "parameters", "train_accuracy", "train_std", "test_accuracy", "test_std", "f1", "detail"];

/// One row per experiment.
pub fn emit_table(summaries: &[Summary], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TABLE_HEADER)?;
    for s in summaries {
        let meta = s.table.clone().unwrap_or_default();
        let dataset = if meta.dataset.is_empty() { s.name.clone() } else { meta.dataset };
        w.write_record([
            dataset,
            meta.encoding,
            s.qubits.to_string(),
            s.parameters.to_string(),
            format!("{:.3}", s.train.0),
            format!("{:.3}", s.train.1),
            format!("{:.3}", s.test.0),
            format!("{:.3}", s.test.1),
            format!("{:.3}", s.f1.0),
            meta.detail,
        ])?;
    }
    w.flush()?;
    Ok(())
}
