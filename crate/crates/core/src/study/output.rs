//! CSV and JSON emission for study results.

use std::io::Read;

use super::{CellSummary, Estimator, StudyResult};
use crate::error::{Result, TailError};

pub const CSV_HEADER: [&str; 11] = [
    "estimator",
    "k",
    "n_used",
    "excluded",
    "xi_mean",
    "xi_bias",
    "xi_var",
    "xi_mse",
    "p_rel_bias",
    "p_rel_var",
    "p_rel_mse",
];

/// Decimal rendering with 12 significant digits, trailing zeros trimmed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (11 - exponent).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

impl StudyResult {
    /// One row per `(estimator, k)`.
    pub fn to_csv(&self) -> String {
        let mut out = CSV_HEADER.join(",");
        out.push('\n');
        for c in &self.cells {
            let row = [
                c.estimator.name().to_string(),
                c.k.to_string(),
                c.n_used.to_string(),
                c.excluded.to_string(),
                format_sig(c.xi_mean),
                format_sig(c.xi_bias),
                format_sig(c.xi_var),
                format_sig(c.xi_mse),
                format_sig(c.p_rel_bias),
                format_sig(c.p_rel_var),
                format_sig(c.p_rel_mse),
            ];
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Full result, configuration included.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("study results serialise")
    }
}

/// Parses the CSV produced by [`StudyResult::to_csv`].
pub fn read_cells_csv<R: Read>(source: R) -> Result<Vec<CellSummary>> {
    let mut reader = csv::Reader::from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| TailError::Parse { line: 1, message: e.to_string() })?
        .clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(TailError::Parse {
            line: 1,
            message: format!("unexpected header {headers:?}"),
        });
    }
    let mut cells = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| TailError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let bad = |field: &str| TailError::Parse {
            line,
            message: format!("bad field {field}"),
        };
        let f = |i: usize| -> Result<f64> { record[i].parse().map_err(|_| bad(CSV_HEADER[i])) };
        let u = |i: usize| -> Result<usize> { record[i].parse().map_err(|_| bad(CSV_HEADER[i])) };
        cells.push(CellSummary {
            estimator: Estimator::parse(&record[0])?,
            k: u(1)?,
            n_used: u(2)?,
            excluded: u(3)?,
            xi_mean: f(4)?,
            xi_bias: f(5)?,
            xi_var: f(6)?,
            xi_mse: f(7)?,
            p_rel_bias: f(8)?,
            p_rel_var: f(9)?,
            p_rel_mse: f(10)?,
        });
    }
    Ok(cells)
}
