//! CSV and JSON conventions shared by every file format.
//!
//! CSV files carry no header; each row is a comma-separated list of decimal
//! numbers. Floats are written with 17 significant digits so that reading a
//! file back reproduces every value bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernel::Point;
use crate::linalg::Matrix;

/// Decimal rendering with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| Error::Csv {
                    path: path.to_path_buf(),
                    line,
                    reason: format!("`{field}` is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Csv {
            path: path.to_path_buf(),
            line: 0,
            reason: format!("{other:?}"),
        },
    }
}

fn rectangular(path: &Path, rows: &[Vec<f64>]) -> Result<usize> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.is_empty() {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            line: 0,
            reason: "file contains no rows".into(),
        });
    }
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            line: i + 1,
            reason: format!("expected {width} columns, found {}", rows[i].len()),
        });
    }
    Ok(width)
}

/// One point per row, one column per coordinate.
pub fn read_points(path: &Path) -> Result<Vec<Point>> {
    let rows = read_rows(path)?;
    rectangular(path, &rows)?;
    rows.into_iter().map(Point::new).collect()
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let rows = read_rows(path)?;
    let width = rectangular(path, &rows)?;
    Ok(Matrix::from_fn(rows.len(), width, |i, j| rows[i][j]))
}

/// Single-column CSV.
pub fn read_column(path: &Path) -> Result<Vec<f64>> {
    let rows = read_rows(path)?;
    let width = rectangular(path, &rows)?;
    if width != 1 {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected a single column, found {width}"),
        });
    }
    Ok(rows.into_iter().map(|r| r[0]).collect())
}

pub fn rows_to_csv<'a, I, R>(rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = &'a f64>,
{
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.into_iter().map(|x| format_f64(*x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_to_csv(m: &Matrix) -> String {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows_to_csv(rows.iter())
}

pub fn column_to_csv(values: &[f64]) -> String {
    rows_to_csv(values.iter().map(std::slice::from_ref))
}

pub fn points_to_csv(points: &[Point]) -> String {
    rows_to_csv(points.iter().map(Point::coords))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with every float rendered to 17 significant digits.
/// Non-finite floats become `null`.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut tree = serde_json::to_value(value).expect("report types serialise to JSON");
    normalise_floats(&mut tree);
    let mut s = serde_json::to_string_pretty(&tree).expect("JSON values serialise");
    s.push('\n');
    s
}

fn normalise_floats(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                *v = float_value(x);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(normalise_floats),
        Value::Object(map) => map.values_mut().for_each(normalise_floats),
        _ => {}
    }
}

fn float_value(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    serde_json::from_str::<serde_json::Number>(&format_f64(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}
