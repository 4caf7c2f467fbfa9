//! Report emission. CSV columns mirror the `ReportRow` fields in declared
//! order; floats carry 17 significant digits so a parse-back reproduces the
//! exact values.

use crate::error::AppError;
use crate::pipeline::ReportRow;

pub const CSV_COLUMNS: [&str; 16] = [
    "d_total",
    "qubits_per_dim",
    "dims",
    "scheme",
    "chi",
    "ks",
    "kl",
    "fidelity",
    "gate_count",
    "depth",
    "baseline_gate_count",
    "function_evaluations",
    "wall_time_ms",
    "seed",
    "cross_validation_error",
    "error",
];

fn float_cell(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float_cell(x: Option<f64>) -> String {
    x.map(float_cell).unwrap_or_default()
}

fn opt_int_cell(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn string_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn rows_to_csv(rows: &[ReportRow]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for row in rows {
        let cells = [
            row.d_total.to_string(),
            row.qubits_per_dim.to_string(),
            row.dims.to_string(),
            string_cell(&row.scheme),
            row.chi.to_string(),
            opt_float_cell(row.ks),
            opt_float_cell(row.kl),
            opt_float_cell(row.fidelity),
            opt_int_cell(row.gate_count),
            opt_int_cell(row.depth),
            opt_int_cell(row.baseline_gate_count),
            opt_int_cell(row.function_evaluations),
            float_cell(row.wall_time_ms),
            row.seed.to_string(),
            opt_float_cell(row.cross_validation_error),
            string_cell(row.error.as_deref().unwrap_or("")),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn rows_to_json(rows: &[ReportRow]) -> Result<String, AppError> {
    serde_json::to_string_pretty(rows)
        .map_err(|e| AppError::Numeric(format!("serializing report: {e}")))
}
