//! Text and CSV renderings of a report. Both are derived from the report
//! alone, so a cached report renders exactly like a fresh one.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::commands::CliError;
use crate::report::RunReport;

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Column names and row cells when the results hold a table.
pub fn table(results: &Value) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let columns: Vec<String> = results.get("columns")?.as_array()?.iter().map(cell).collect();
    let rows = results
        .get("rows")?
        .as_array()?
        .iter()
        .map(|row| columns.iter().map(|c| row.get(c).map(cell).unwrap_or_default()).collect())
        .collect();
    Some((columns, rows))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if prefix.is_empty() && (k == "columns" || k == "rows") {
                    continue;
                }
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

pub fn pretty(report: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} ({:?}) [{}]", report.command.name, report.status, report.tool_version);
    let _ = writeln!(s, "input digest {}", report.input_digest);
    let mut lines = Vec::new();
    flatten("", &report.results, &mut lines);
    let width = lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in &lines {
        let _ = writeln!(s, "  {k:<width$}  {v}");
    }
    if let Some((columns, rows)) = table(&report.results) {
        let widths: Vec<usize> = (0..columns.len())
            .map(|i| rows.iter().map(|r| r[i].len()).chain([columns[i].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &[String]| {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
        };
        let _ = writeln!(s, "{}", line(&columns));
        for r in &rows {
            let _ = writeln!(s, "{}", line(r));
        }
    }
    if let Some(t) = &report.timings {
        let _ = writeln!(s, "{:.1} ms{}", t.total_ms, if t.cache_hit { " (cached)" } else { "" });
    }
    s
}

pub fn write_csv(report: &RunReport, path: &Path) -> Result<(), CliError> {
    let (columns, rows) = table(&report.results)
        .ok_or_else(|| CliError::input(format!("the {} command has no table to export", report.command.name)))?;
    let io = |e: csv::Error| CliError::input(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&columns).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}
