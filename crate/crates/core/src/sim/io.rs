//! CSV and JSON-lines writers for run records and batch summaries.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

use super::run::{RunRecord, RunSummary};

const OBSERVER_FIELDS: [&str; 10] = ["dx", "dy", "dz", "mx", "my", "mz", "l", "err", "eps_d", "eps_l"];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(format!("csv: {e}"))
}

/// Header of the per-run CSV for the given record.
pub fn run_csv_header(record: &RunRecord) -> Vec<String> {
    let mut h: Vec<String> = [
        "step", "time", "true_dx", "true_dy", "true_dz", "true_mx", "true_my", "true_mz", "true_l", "meas_mx",
        "meas_my", "meas_mz", "nu_x", "nu_y", "nu_z", "omega_x", "omega_y", "omega_z",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for t in &record.observers {
        h.extend(OBSERVER_FIELDS.iter().map(|f| format!("{}_{f}", t.spec)));
    }
    h
}

/// Writes one header row and one row per sample. Floats use the shortest
/// representation that parses back to the same value; missing values are `NaN`.
pub fn write_run_csv<W: Write>(record: &RunRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(run_csv_header(record)).map_err(csv_err)?;
    let mut row: Vec<String> = Vec::new();
    for (k, s) in record.steps.iter().enumerate() {
        row.clear();
        row.push(s.step.to_string());
        row.push(s.time.to_string());
        let d = s.truth.direction();
        let m = s.truth.moment();
        row.extend(d.iter().chain(m.iter()).map(f64::to_string));
        row.push(s.truth.depth().to_string());
        row.extend(s.measured.iter().chain(s.twist.nu.iter()).chain(s.twist.omega.iter()).map(f64::to_string));
        for t in &record.observers {
            match &t.estimates[k] {
                Some(p) => {
                    row.extend(p.direction().iter().chain(p.moment().iter()).map(f64::to_string));
                    row.push(p.depth().to_string());
                }
                None => row.extend(std::iter::repeat_n("NaN".to_string(), 7)),
            }
            row.push(t.error_norm[k].to_string());
            row.push(t.eps_d[k].to_string());
            row.push(t.eps_l[k].to_string());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line, in the given order.
pub fn write_summary_jsonl<W: Write>(summaries: &[RunSummary], mut out: W) -> Result<()> {
    for s in summaries {
        serde_json::to_writer(&mut out, s).map_err(|e| Error::Io(format!("json: {e}")))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads summaries back; blank lines are skipped.
pub fn read_summary_jsonl<R: BufRead>(input: R) -> Result<Vec<RunSummary>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Format(format!("summary line {}: {e}", i + 1)))?);
    }
    Ok(out)
}
