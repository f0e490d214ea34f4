//! Report rows and their CSV/JSON/stdout renderings.
//!
//! Verification rows carry `{experiment, quantity, closed_form, monte_carlo,
//! std_error, pass}`; audit rows carry `{group, label, fraction,
//! subgroup_size}`. A row's `--out` path is written as JSON when it ends in
//! `.json` and CSV when it ends in `.csv`; the sibling file in the other
//! format is always written next to it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One verification check: a closed-form value against a Monte Carlo
/// estimate (or a second algebraic route, in which case `std_error` is
/// empty).
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub experiment: String,
    pub quantity: String,
    pub closed_form: f64,
    pub monte_carlo: Option<f64>,
    pub std_error: Option<f64>,
    pub pass: bool,
}

/// One audit report line. `subgroup_size` is empty on skew rows, which
/// compare two groups instead of describing one.
#[derive(Debug, Clone, Serialize)]
pub struct AuditRow {
    pub group: String,
    pub label: String,
    pub fraction: Option<f64>,
    pub subgroup_size: Option<usize>,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ReportError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| ReportError::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
    }
    fs::write(path, bytes).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// The JSON/CSV sibling pair for an output path.
pub fn sibling_paths(out: &Path) -> (PathBuf, PathBuf) {
    match out.extension().and_then(|e| e.to_str()) {
        Some("csv") => (out.with_extension("json"), out.to_path_buf()),
        _ => (out.to_path_buf(), out.with_extension("csv")),
    }
}

/// Writes rows as both JSON and CSV next to each other.
pub fn write_rows<T: Serialize>(out: &Path, rows: &[T]) -> Result<(), ReportError> {
    let (json_path, csv_path) = sibling_paths(out);
    let mut json = serde_json::to_vec_pretty(rows)?;
    json.push(b'\n');
    write_file(&json_path, &json)?;

    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().expect("csv writer over Vec");
    write_file(&csv_path, &bytes)
}

/// Renders the human-readable verification table to `out` once, after all
/// checks ran.
pub fn print_check_table(mut out: impl Write, rows: &[CheckRow]) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<20} {:<34} {:>14} {:>14} {:>12}  pass",
        "experiment", "quantity", "closed_form", "monte_carlo", "std_error"
    )?;
    for row in rows {
        let mc = row
            .monte_carlo
            .map(|v| format!("{v:>14.6}"))
            .unwrap_or_else(|| format!("{:>14}", "-"));
        let se = row
            .std_error
            .map(|v| format!("{v:>12.2e}"))
            .unwrap_or_else(|| format!("{:>12}", "-"));
        writeln!(
            out,
            "{:<20} {:<34} {:>14.6} {} {}  {}",
            row.experiment,
            row.quantity,
            row.closed_form,
            mc,
            se,
            if row.pass { "pass" } else { "FAIL" }
        )?;
    }
    Ok(())
}
