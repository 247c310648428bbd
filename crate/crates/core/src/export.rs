//! Plain-text writers for the CSV and JSON artifacts.
//!
//! Every number is written with 17 significant digits in scientific
//! notation, which round-trips an `f64` exactly and is byte-stable.

use std::fmt::Write;

/// Format a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// JSON array of floats.
pub fn json_array(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 24 + 2);
    out.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt17(*v));
    }
    out.push(']');
    out
}

/// Simple column-oriented CSV table.
#[derive(Debug, Clone)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Append a row of floats.
    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row.iter().map(|v| fmt17(*v)).collect());
    }

    /// Append a row of preformatted cells.
    pub fn push_cells(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}
