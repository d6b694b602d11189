//! Result tables and their CSV form.
//!
//! Floats are written in scientific notation with 17 significant digits, so
//! every value round-trips exactly and identical tables give identical bytes.

use std::path::Path;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cells: Vec<Cell>,
    /// Marks a blow-up row; only flagged rows may hold non-finite floats.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<Cell>) -> Result<()> {
        self.push_row(Row { cells, flagged: false })
    }

    pub fn push_flagged(&mut self, cells: Vec<Cell>) -> Result<()> {
        self.push_row(Row { cells, flagged: true })
    }

    fn push_row(&mut self, row: Row) -> Result<()> {
        if row.cells.len() != self.columns.len() {
            return Err(HarnessError::RowWidth {
                row: self.rows.len(),
                got: row.cells.len(),
                expected: self.columns.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Column `name` as floats; non-float cells are skipped.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let Some(j) = self.columns.iter().position(|c| c == name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter_map(|r| match r.cells[j] {
                Cell::Float(x) => Some(x),
                _ => None,
            })
            .collect()
    }

    fn check(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.cells.len() != self.columns.len() {
                return Err(HarnessError::RowWidth {
                    row: i,
                    got: row.cells.len(),
                    expected: self.columns.len(),
                });
            }
            if row.flagged {
                continue;
            }
            for (cell, col) in row.cells.iter().zip(&self.columns) {
                if let Cell::Float(x) = cell {
                    if !x.is_finite() {
                        return Err(HarnessError::NonFinite {
                            row: i,
                            column: col.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        self.check()?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.cells.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| HarnessError::io("<csv buffer>", e.into_error()))
    }
}

/// Writes `table` as CSV. Nothing is written if the table is refused.
pub fn write_results(table: &ResultTable, path: &Path) -> Result<()> {
    let bytes = table.to_csv_bytes()?;
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}
