//! Knot ingestion from CSV / JSON rows `(t, x, y, z)` and sample emission.

use std::io::Write;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::quat::{SpherePoint, Vec3};

/// Inputs within this distance of the unit sphere are silently normalized.
pub const NORMALIZE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("cannot read input: {0}")]
    Io(String),

    #[error("malformed CSV at record {record}: {msg}")]
    Csv { record: usize, msg: String },

    #[error("malformed JSON: {0}")]
    Json(String),

    #[error("row {row}: {msg}")]
    Field { row: usize, msg: String },

    #[error("row {row}: |p| = {norm} is too far from 1 to normalize")]
    NotUnit { row: usize, norm: f64 },

    #[error("input contains no rows")]
    Empty,

    #[error("unknown input format `{0}` (expected csv or json)")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guesses from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(ParseError::Format(s.into())),
        }
    }
}

/// A timestamped knot as read from disk.
pub type TimedPoint = (f64, SpherePoint);

fn to_point(row: usize, t: f64, x: f64, y: f64, z: f64) -> Result<TimedPoint, ParseError> {
    if ![t, x, y, z].iter().all(|v| v.is_finite()) {
        return Err(ParseError::Field {
            row,
            msg: "non-finite value".into(),
        });
    }
    let v = Vec3::new(x, y, z);
    let norm = v.norm();
    if (norm - 1.0).abs() > NORMALIZE_TOL {
        return Err(ParseError::NotUnit { row, norm });
    }
    let p = SpherePoint::normalize(v).map_err(|e| ParseError::Field {
        row,
        msg: e.to_string(),
    })?;
    Ok((t, p))
}

fn parse_csv(text: &str) -> Result<Vec<TimedPoint>, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (record_index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ParseError::Csv {
            record: record_index,
            msg: e.to_string(),
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let fields: Vec<Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if record_index == 0 && fields.iter().any(Result::is_err) {
            // header line
            continue;
        }
        if fields.len() != 4 {
            return Err(ParseError::Field {
                row: out.len(),
                msg: format!("expected 4 fields (t, x, y, z), got {}", fields.len()),
            });
        }
        let mut vals = [0.0; 4];
        for (slot, (f, raw)) in vals.iter_mut().zip(fields.into_iter().zip(record.iter())) {
            *slot = f.map_err(|_| ParseError::Field {
                row: out.len(),
                msg: format!("`{raw}` is not a number"),
            })?;
        }
        out.push(to_point(out.len(), vals[0], vals[1], vals[2], vals[3])?);
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonRow {
    Tuple([f64; 4]),
    Object { t: f64, x: f64, y: f64, z: f64 },
}

fn parse_json(text: &str) -> Result<Vec<TimedPoint>, ParseError> {
    let rows: Vec<JsonRow> =
        serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    rows.into_iter()
        .enumerate()
        .map(|(i, r)| match r {
            JsonRow::Tuple([t, x, y, z]) | JsonRow::Object { t, x, y, z } => {
                to_point(i, t, x, y, z)
            }
        })
        .collect()
}

/// Parses knot rows, normalizing near-unit vectors.
pub fn parse_knots(text: &str, format: Format) -> Result<Vec<TimedPoint>, ParseError> {
    let rows = match format {
        Format::Csv => parse_csv(text)?,
        Format::Json => parse_json(text)?,
    };
    if rows.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(rows)
}

pub fn read_knots(path: &Path, format: Option<Format>) -> Result<Vec<TimedPoint>, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io(e.to_string()))?;
    parse_knots(&text, format.unwrap_or_else(|| Format::from_path(path)))
}

/// `{:.16e}`: 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One cell of an emitted table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Num(x) if x.is_finite() => fmt_num(*x),
            Cell::Text(s) => serde_json::Value::String(s.clone()).to_string(),
            Cell::Num(_) | Cell::Missing => "null".into(),
        }
    }
}

pub fn write_csv_table<W: Write>(
    mut w: W,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> std::io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// The same table as a JSON array of objects keyed by `header`.
pub fn write_json_table<W: Write>(
    mut w: W,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> std::io::Result<()> {
    writeln!(w, "[")?;
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = header
            .iter()
            .zip(row)
            .map(|(k, c)| format!("\"{k}\": {}", c.json()))
            .collect();
        let sep = if i + 1 == rows.len() { "" } else { "," };
        writeln!(w, "  {{{}}}{sep}", cells.join(", "))?;
    }
    writeln!(w, "]")
}

pub fn write_table<W: Write>(
    w: W,
    format: Format,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv_table(w, header, rows),
        Format::Json => write_json_table(w, header, rows),
    }
}
