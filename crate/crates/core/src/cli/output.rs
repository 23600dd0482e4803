//! CSV and JSON writers shared by the subcommands.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Integers below 2^53 print exactly, everything else with 17 significant
/// digits, which round-trips every finite double.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 9_007_199_254_740_992.0 {
        format!("{}", x as i64)
    } else if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A cell of a table row.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, Into::into),
            Cell::Int(i) => (*i).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

/// Column names plus rows; rendered as CSV or as `{"columns", "rows"}` JSON.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
struct TableJson<'a> {
    columns: &'a [String],
    rows: Vec<Vec<serde_json::Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let rows = self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect();
        Ok(serde_json::to_string(&TableJson { columns: &self.columns, rows })? + "\n")
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)?;
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parses a CSV produced by [`Table::to_csv`] (no quoting).
pub fn parse_csv(text: &str) -> Result<Table> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| crate::Error::Config("empty CSV input".into()))?;
    let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
    let mut table = Table { columns, rows: Vec::new() };
    for (i, line) in lines.enumerate() {
        let row: Vec<Cell> = line
            .split(',')
            .map(|c| {
                let c = c.trim();
                if c.is_empty() {
                    Cell::Empty
                } else {
                    c.parse::<f64>().map_or_else(|_| Cell::Text(c.to_string()), Cell::Num)
                }
            })
            .collect();
        if row.len() != table.columns.len() {
            return Err(crate::Error::Config(format!(
                "CSV row {} has {} cells, header has {}",
                i + 2,
                row.len(),
                table.columns.len()
            )));
        }
        table.rows.push(row);
    }
    Ok(table)
}

impl Table {
    /// Numeric values of a named column; non-numeric cells are an error.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| crate::Error::Config(format!("no column '{name}' (have {})", self.columns.join(","))))?;
        self.rows
            .iter()
            .map(|r| match &r[idx] {
                Cell::Num(x) => Ok(*x),
                Cell::Int(i) => Ok(*i as f64),
                other => Err(crate::Error::Config(format!("column '{name}' holds non-numeric {other:?}"))),
            })
            .collect()
    }
}
