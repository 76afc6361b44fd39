//! CSV artifacts and TOML summaries.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits round-trip every f64
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }
}

pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    for (i, row) in table.rows.iter().enumerate() {
        if row.len() != table.header.len() {
            bail!(
                "row {i} has {} cells but the header has {} columns ({})",
                row.len(),
                table.header.len(),
                path.display()
            );
        }
    }
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(&table.header)
        .with_context(|| format!("cannot write {}", path.display()))?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    w.flush()
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Header and numeric rows of a CSV file.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let header: Vec<String> = r
        .headers()
        .with_context(|| format!("cannot read header of {}", path.display()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: bad record {}", path.display(), i + 1))?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| {
                format!("{}: non-numeric value in record {}", path.display(), i + 1)
            })?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// One column of a numeric CSV: the named one, else `x`, else the last.
pub fn read_series(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    let (header, rows) = read_csv(path)?;
    let idx = match column {
        Some(c) => header
            .iter()
            .position(|h| h == c)
            .with_context(|| format!("{}: no column `{c}`", path.display()))?,
        None => header
            .iter()
            .position(|h| h == "x")
            .unwrap_or(header.len().saturating_sub(1)),
    };
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            r.get(idx)
                .copied()
                .with_context(|| format!("{}: record {} is short", path.display(), i + 1))
        })
        .collect()
}

pub fn write_toml<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text =
        toml::to_string(value).with_context(|| format!("cannot serialize {}", path.display()))?;
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_summary(summary: &crate::experiments::RunSummary, path: &Path) -> Result<()> {
    write_toml(summary, path)
}
