//! Tabular artifacts written as `<experiment>-<metric>.{csv,json}`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::Format;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: &'static str,
    /// Unit in the experiment's natural units; `1` for dimensionless.
    pub unit: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub metric: &'static str,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    /// Columns given as `(name, unit)` pairs.
    pub fn new(metric: &'static str, columns: &[(&'static str, &'static str)]) -> Self {
        Self {
            metric,
            columns: columns.iter().map(|&(name, unit)| Column { name, unit }).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.metric);
        self.rows.push(row);
    }

    pub fn file_name(&self, experiment: &str, format: Format) -> String {
        format!("{experiment}-{}.{}", self.metric, format.extension())
    }

    pub fn write(&self, path: &Path, format: Format) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(path),
            Format::Json => {
                let mut w = BufWriter::new(File::create(path)?);
                serde_json::to_writer_pretty(&mut w, self)?;
                w.write_all(b"\n")?;
                w.flush()
            }
        }
    }

    fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(self.columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()
    }
}
