//! CSV/JSON output helpers. Given the same config and seed the emitted
//! bytes are identical run to run, except for the timestamp comment line,
//! which `--no-timestamp` suppresses.

use std::fs;
use std::path::Path;

use stein::{Result, SteinError};

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Formats one CSV row with RFC-4180 quoting.
pub fn csv_row(fields: &[String]) -> String {
    fields.iter().map(|f| csv_escape(f)).collect::<Vec<_>>().join(",")
}

/// Writes a CSV file: optional timestamp comment, header, rows.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: &[Vec<String>],
    no_timestamp: bool,
) -> Result<()> {
    let mut out = String::new();
    if !no_timestamp {
        out.push_str(&format!("# generated_at {}\n", chrono::Utc::now().to_rfc3339()));
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&csv_row(row));
        out.push('\n');
    }
    fs::write(path, out)
        .map_err(|e| SteinError::Invalid(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| SteinError::Invalid(format!("serialize error: {e}")))?;
    fs::write(path, text + "\n")
        .map_err(|e| SteinError::Invalid(format!("cannot write {}: {e}", path.display())))
}

/// Shortest-roundtrip float formatting, deterministic per build.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}
