//! Flat result tables and their two serializations.
//!
//! Sweeps and figure datasets are tables: a header of column names and rows
//! of numbers, plus one text column for diagnostic flags. Two formats are
//! emitted — CSV (header row, one line per row) and JSON-lines (one object
//! per row, keys in column order) — and both are re-read by this module, so
//! every file the tool writes is also a file the tool can load.
//!
//! Two properties the acceptance gate leans on are enforced here rather
//! than at call sites:
//!
//! * cells are finite: NaN or infinity in a row is an error at insertion,
//!   which is what makes the "NaN-free sweep output" guarantee global;
//! * formatting is deterministic: floats render as the shortest string that
//!   parses back to the same bits (plain decimal in mid range, exponent
//!   notation outside it), so identical tables give identical bytes.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// One table cell: a finite number, or text (the flags column).
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Num(_) => None,
            Cell::Text(s) => Some(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Cell {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Cell {
        Cell::Text(s)
    }
}

/// Shortest f64 rendering that parses back bit-identically. Mid-range
/// magnitudes print as plain decimals for readability; everything else uses
/// exponent notation (a 1e-30 loss rate should not become thirty zeros).
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        // Covers -0.0 too: Display keeps the sign, and `-0` parses back
        // with the sign bit set.
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Column-ordered table of evaluation results.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    /// Start an empty table with the given header. Column names must be
    /// unique and free of CSV/JSON-hostile characters.
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Result<ResultTable> {
        let columns: Vec<String> = columns.into_iter().map(Into::into).collect();
        if columns.is_empty() {
            return Err(Error::Sweep("a result table needs at least one column".into()));
        }
        for (i, name) in columns.iter().enumerate() {
            if name.is_empty() || name.contains([',', '\n', '\r', '"']) {
                return Err(Error::Sweep(format!("bad column name `{name}`")));
            }
            if columns[..i].contains(name) {
                return Err(Error::Sweep(format!("duplicate column `{name}`")));
            }
        }
        Ok(ResultTable {
            columns,
            rows: Vec::new(),
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cell at (row, column name), if both exist.
    pub fn get(&self, row: usize, column: &str) -> Option<&Cell> {
        let idx = self.column_index(column)?;
        self.rows.get(row)?.get(idx)
    }

    /// Append one row. Width must match the header; numbers must be finite;
    /// text must not need CSV quoting.
    pub fn push_row(&mut self, cells: Vec<Cell>) -> Result<()> {
        if cells.len() != self.columns.len() {
            return Err(Error::Sweep(format!(
                "row has {} cells but the table has {} columns",
                cells.len(),
                self.columns.len()
            )));
        }
        for (cell, col) in cells.iter().zip(&self.columns) {
            match cell {
                Cell::Num(x) if !x.is_finite() => {
                    return Err(Error::Sweep(format!(
                        "non-finite value {x} in column `{col}`; results must use flagged sentinels instead"
                    )));
                }
                Cell::Text(s) if s.contains([',', '\n', '\r', '"']) => {
                    return Err(Error::Sweep(format!(
                        "text cell {s:?} in column `{col}` would need CSV quoting"
                    )));
                }
                _ => {}
            }
        }
        self.rows.push(cells);
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    out.push(',');
                }
                first = false;
                match cell {
                    Cell::Num(x) => {
                        let _ = write!(out, "{}", format_f64(*x));
                    }
                    Cell::Text(s) => out.push_str(s),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parse a table written by [`ResultTable::to_csv`]. Fields that parse
    /// as finite numbers become numeric cells; everything else stays text.
    pub fn from_csv(text: &str) -> Result<ResultTable> {
        let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
        let header = lines
            .next()
            .ok_or_else(|| Error::Sweep("empty CSV input".into()))?;
        let mut table = ResultTable::new(header.split(',').collect::<Vec<_>>())?;
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let cells: Vec<Cell> = line
                .split(',')
                .map(|field| match field.parse::<f64>() {
                    Ok(x) if x.is_finite() => Cell::Num(x),
                    _ => Cell::Text(field.to_string()),
                })
                .collect();
            table.push_row(cells).map_err(|e| {
                Error::Sweep(format!("CSV line {}: {e}", lineno + 2))
            })?;
        }
        Ok(table)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            for (col, cell) in self.columns.iter().zip(row) {
                let v = match cell {
                    Cell::Num(x) => serde_json::json!(x),
                    Cell::Text(s) => serde_json::json!(s),
                };
                obj.insert(col.clone(), v);
            }
            out.push_str(&serde_json::Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }

    /// Parse JSON-lines written by [`ResultTable::to_jsonl`]. The first
    /// object fixes the column order; later objects must carry exactly the
    /// same keys.
    pub fn from_jsonl(text: &str) -> Result<ResultTable> {
        let mut table: Option<ResultTable> = None;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let at = |detail: String| Error::Sweep(format!("JSONL line {}: {detail}", lineno + 1));
            let value: serde_json::Value =
                serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
            let serde_json::Value::Object(obj) = value else {
                return Err(at("expected one JSON object per line".into()));
            };
            let table = match &mut table {
                Some(t) => t,
                None => {
                    let cols: Vec<String> = obj.keys().cloned().collect();
                    table.insert(ResultTable::new(cols)?)
                }
            };
            if obj.len() != table.columns.len()
                || !table.columns.iter().all(|c| obj.contains_key(c))
            {
                return Err(at(format!(
                    "keys do not match the first row's columns {:?}",
                    table.columns
                )));
            }
            let mut cells = Vec::with_capacity(table.columns.len());
            for col in &table.columns {
                let cell = match &obj[col] {
                    serde_json::Value::Number(n) => {
                        let x = n
                            .as_f64()
                            .ok_or_else(|| at(format!("column `{col}`: unreadable number")))?;
                        Cell::Num(x)
                    }
                    serde_json::Value::String(s) => Cell::Text(s.clone()),
                    other => {
                        return Err(at(format!(
                            "column `{col}`: expected number or string, got {other}"
                        )));
                    }
                };
                cells.push(cell);
            }
            table.push_row(cells)?;
        }
        table.ok_or_else(|| Error::Sweep("empty JSONL input".into()))
    }
}
