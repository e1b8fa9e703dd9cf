//! Text serializations of [`SolveReport`]: a flat `key=value` block and a
//! single CSV row.

use std::fmt::Write as _;

use super::SolveReport;

pub const CSV_HEADER: &str = "method,continuous_obj,binary_obj,beta,wall_time_s,converged";

/// Quote a CSV field when it contains a delimiter, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `key=value` lines. Positions in `assignment` are 1-based.
pub fn to_key_value(report: &SolveReport, beta: Option<f64>) -> String {
    let mut out = String::new();
    let choices: Vec<String> = report.assignment.choices().iter().map(|k| (k + 1).to_string()).collect();
    let _ = writeln!(out, "method={}", report.method);
    let _ = writeln!(out, "continuous_objective={}", report.continuous_objective);
    let _ = writeln!(out, "binary_objective={}", report.binary_objective);
    let _ = writeln!(out, "assignment={}", choices.join(","));
    if let Some(beta) = beta {
        let _ = writeln!(out, "beta={beta}");
    }
    let _ = writeln!(out, "iterations={}", report.iterations);
    let _ = writeln!(out, "wall_time_s={}", report.wall_time);
    let _ = writeln!(out, "converged={}", report.converged);
    if let Some(w) = &report.warm_start {
        let _ = writeln!(out, "warm_start={w}");
    }
    for (k, v) in &report.diagnostics {
        let _ = writeln!(out, "diag.{k}={v}");
    }
    out
}

/// One row matching [`CSV_HEADER`]; `beta` is left empty when unknown.
pub fn to_csv_row(report: &SolveReport, beta: Option<f64>) -> String {
    format!(
        "{},{},{},{},{},{}",
        csv_field(&report.method),
        report.continuous_objective,
        report.binary_objective,
        beta.map(|b| b.to_string()).unwrap_or_default(),
        report.wall_time,
        report.converged
    )
}
