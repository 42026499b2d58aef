//! CSV and plot-data emission.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A single CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Real)
    }

    pub fn render(&self) -> String {
        match self {
            Cell::Real(v) => format_real(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

/// 17 significant digits in scientific notation; parses back to the same
/// `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// # Panics
    /// If the row length differs from the header length.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row length must match the header");
        self.rows.push(row);
    }

    /// Comment line with the config hash, then the header and rows.
    pub fn to_bytes(&self, config_hash: &str) -> Result<Vec<u8>> {
        let mut buf = format!("# config_hash={config_hash}\n").into_bytes();
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
            w.write_record(&self.header)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::render))?;
            }
            w.flush()?;
        }
        Ok(buf)
    }

    pub fn write(&self, path: &Path, config_hash: &str) -> Result<()> {
        fs::write(path, self.to_bytes(config_hash)?)?;
        Ok(())
    }
}

/// Reads back a table written by [`CsvTable::write`], skipping the comment
/// line.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let header = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

/// Two whitespace-separated columns, one point per line.
pub fn write_plot(path: &Path, config_hash: &str, columns: (&str, &str), points: &[(f64, f64)]) -> Result<()> {
    let mut s = format!("# config_hash={config_hash}\n# {} {}\n", columns.0, columns.1);
    for (x, y) in points {
        s.push_str(&format_real(*x));
        s.push(' ');
        s.push_str(&format_real(*y));
        s.push('\n');
    }
    fs::write(path, s).map_err(Error::from)
}
