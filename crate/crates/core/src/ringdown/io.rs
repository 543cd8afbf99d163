use std::fmt::Write as _;
use std::path::Path;

use super::RingdownTrace;
use crate::{Error, Result};

/// Parses a two-column `t_seconds,v_volts` CSV. A header row is optional and
/// lines starting with `#` are ignored.
pub fn parse_trace_csv(text: &str) -> Result<RingdownTrace> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut samples = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Trace(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::Trace(format!(
                "row {}: expected 2 columns, found {}",
                row + 1,
                record.len()
            )));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(t), Ok(v)) => samples.push((t, v)),
            _ if samples.is_empty() && row == 0 => continue, // header
            _ => {
                return Err(Error::Trace(format!(
                    "row {}: cannot parse {:?}",
                    row + 1,
                    record.iter().collect::<Vec<_>>()
                )))
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::Trace("no samples".into()));
    }
    RingdownTrace::new(samples)
}

pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<RingdownTrace> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_trace_csv(&text)
}

/// Writes a trace with a `t_seconds,v_volts` header using shortest
/// round-trip float formatting.
pub fn write_trace_csv(trace: &RingdownTrace) -> String {
    let mut out = String::from("t_seconds,v_volts\n");
    for (t, v) in trace.samples() {
        let _ = writeln!(out, "{t:e},{v:e}");
    }
    out
}
