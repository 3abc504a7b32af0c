//! Bundled reference tables of vacuum-subtracted `P0 P1 + P1 P0` values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const QUBITS12: &str = include_str!("../../../fixtures/tables/qubits12.csv");
const QUBITS104: &str = include_str!("../../../fixtures/tables/qubits104.csv");

const HEADER: &str = "t,x,classical_value,hardware_value,hardware_err";

/// One `(t, x)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub t: f64,
    pub x: usize,
    pub classical_value: f64,
    pub hardware_value: f64,
    pub hardware_err: f64,
}

/// Parses the table CSV format.
pub fn parse_table(text: &str) -> Result<Vec<TableRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{HEADER}`"),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("`{s}`: {e}"),
            })
        };
        rows.push(TableRow {
            t: num(fields[0])?,
            x: fields[1].parse().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("`{}`: {e}", fields[1]),
            })?,
            classical_value: num(fields[2])?,
            hardware_value: num(fields[3])?,
            hardware_err: num(fields[4])?,
        });
    }
    Ok(rows)
}

/// The 12-qubit run: a length-3 string, `t = 1..13`.
pub fn qubits12() -> Vec<TableRow> {
    parse_table(QUBITS12).expect("bundled table parses")
}

/// The 104-qubit run: a length-41 string.
pub fn qubits104() -> Vec<TableRow> {
    parse_table(QUBITS104).expect("bundled table parses")
}

/// Cell lookup by time and position.
pub fn lookup(rows: &[TableRow], t: f64, x: usize) -> Option<&TableRow> {
    rows.iter().find(|r| (r.t - t).abs() < 1e-9 && r.x == x)
}
