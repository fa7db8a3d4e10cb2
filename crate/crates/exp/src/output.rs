//! CSV tables with frozen headers.

use std::fs;
use std::path::Path;

use crate::error::{ExpError, Result};

pub const NHAT_HEADER: &[&str] = &["replicate_index", "m", "nhat", "certified", "excluded_flag"];
pub const AGNOSTIC_NHAT_HEADER: &[&str] = &["replicate_index", "m", "nhat", "certified", "excluded_flag", "fstar", "beta"];
pub const TRACE_HEADER: &[&str] = &["replicate", "m", "queried", "N", "nhat_snapshot", "deltaVS_snapshot"];
pub const R_SERIES_HEADER: &[&str] = &["r", "value", "mode"];
pub const M_SERIES_HEADER: &[&str] = &["m", "value", "mode"];
pub const AGNOSTIC_R_SERIES_HEADER: &[&str] = &["r", "value", "mode", "fstar", "beta"];
pub const AGNOSTIC_M_SERIES_HEADER: &[&str] = &["m", "value", "mode", "fstar", "beta"];
pub const QUERIES_HEADER: &[&str] = &["replicate_index", "m", "N"];
pub const SANDWICH_HEADER: &[&str] = &["replicate_index", "m", "N", "max_nhat", "lower_holds", "upper", "upper_holds"];
pub const COVERAGE_HEADER: &[&str] = &["replicate_index", "m", "nhat", "deltaVS", "coverage_bound", "holds"];
pub const FREQUENCY_HEADER: &[&str] = &["n", "frequency"];
pub const BOUNDS_HEADER: &[&str] = &["m", "n", "lw_compression", "coverage", "query_upper_term"];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// 17 significant digits, which round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(file: impl Into<String>, header: &'static [&'static str]) -> Self {
        Table {
            file: file.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "{}", self.file);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| ExpError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(&self.file);
        fs::write(&path, self.to_csv()?).map_err(|source| ExpError::Io { path, source })
    }
}
