//! Minimal fixed-schema CSV reading and writing shared by the trace exports.

use crate::error::{Error, Result};

/// Twelve significant digits, scientific notation. Stable across platforms.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_row(out: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|&v| fmt_sig12(v)).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// Parse a CSV body with the exact `header`, skipping blank lines and `#` comments.
pub fn parse_rows(text: &str, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let got: Vec<&str> = first.split(',').map(str::trim).collect();
    if got != header {
        return Err(Error::Parse(format!(
            "unexpected header {got:?}, expected {header:?}"
        )));
    }
    lines
        .map(|(n, line)| {
            let row = line
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("line {}: bad number {c:?}", n + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != header.len() {
                return Err(Error::Parse(format!(
                    "line {}: {} columns, expected {}",
                    n + 1,
                    row.len(),
                    header.len()
                )));
            }
            Ok(row)
        })
        .collect()
}
