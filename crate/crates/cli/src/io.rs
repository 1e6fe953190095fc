//! CSV and JSON batch files.
//!
//! CSV files start with a header `x1,...,xN` (complex data: `re1,im1,...`)
//! followed by one row per draw. Values are written with 17 significant
//! digits so every double reads back bit for bit. JSON files hold an object
//! `{spec, seed, rows}`; complex rows are arrays of `[re, im]` pairs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

/// Rows of real or complex values with optional provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct DataBatch {
    /// Free-form description of the law or transform that produced the rows.
    pub spec: Value,
    pub seed: Option<u64>,
    pub dim: usize,
    pub rows: Rows,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rows {
    Real(Vec<Vec<f64>>),
    Complex(Vec<Vec<Complex64>>),
}

impl Rows {
    pub fn len(&self) -> usize {
        match self {
            Rows::Real(r) => r.len(),
            Rows::Complex(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Rows::Complex(_))
    }
}

impl DataBatch {
    pub fn real(spec: Value, seed: Option<u64>, dim: usize, rows: Vec<Vec<f64>>) -> Self {
        DataBatch {
            spec,
            seed,
            dim,
            rows: Rows::Real(rows),
        }
    }

    pub fn complex(spec: Value, seed: Option<u64>, dim: usize, rows: Vec<Vec<Complex64>>) -> Self {
        DataBatch {
            spec,
            seed,
            dim,
            rows: Rows::Complex(rows),
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_csv(batch: &DataBatch) -> String {
    let mut out = String::new();
    let header: Vec<String> = match batch.rows {
        Rows::Real(_) => (1..=batch.dim).map(|j| format!("x{j}")).collect(),
        Rows::Complex(_) => (1..=batch.dim)
            .flat_map(|j| [format!("re{j}"), format!("im{j}")])
            .collect(),
    };
    out.push_str(&header.join(","));
    out.push('\n');
    match &batch.rows {
        Rows::Real(rows) => {
            for r in rows {
                let cells: Vec<String> = r.iter().map(|&v| num(v)).collect();
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
        }
        Rows::Complex(rows) => {
            for r in rows {
                let cells: Vec<String> = r.iter().flat_map(|z| [num(z.re), num(z.im)]).collect();
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
        }
    }
    out
}

pub fn to_json(batch: &DataBatch) -> String {
    let rows = match &batch.rows {
        Rows::Real(rows) => json!(rows),
        Rows::Complex(rows) => {
            json!(rows
                .iter()
                .map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
                .collect::<Vec<_>>())
        }
    };
    let v = json!({ "spec": batch.spec, "seed": batch.seed, "dim": batch.dim, "rows": rows });
    serde_json::to_string_pretty(&v).expect("batch serializes") + "\n"
}

pub fn write_batch(batch: &DataBatch, path: &Path, format: Format) -> Result<(), IoError> {
    let text = match format {
        Format::Csv => to_csv(batch),
        Format::Json => to_json(batch),
    };
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a CSV or JSON batch, chosen by extension. `expect_dim` rejects
/// files whose width differs from a declared dimension.
pub fn read_batch(path: &Path, expect_dim: Option<usize>) -> Result<DataBatch, IoError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: name.clone(),
        source,
    })?;
    match Format::from_path(path) {
        Format::Csv => parse_csv(&text, &name, expect_dim),
        Format::Json => parse_json(&text, &name, expect_dim),
    }
}

pub fn parse_csv(text: &str, name: &str, expect_dim: Option<usize>) -> Result<DataBatch, IoError> {
    let err = |line: usize, msg: String| IoError::Parse {
        path: name.to_string(),
        line,
        msg,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing header row".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let complex = cols.first().is_some_and(|c| c.starts_with("re"));
    let dim = if complex { cols.len() / 2 } else { cols.len() };
    let want: Vec<String> = if complex {
        (1..=dim)
            .flat_map(|j| [format!("re{j}"), format!("im{j}")])
            .collect()
    } else {
        (1..=dim).map(|j| format!("x{j}")).collect()
    };
    if cols != want || dim == 0 {
        return Err(err(
            1,
            format!("header '{header}' is not x1,...,xN or re1,im1,..."),
        ));
    }
    if let Some(n) = expect_dim.filter(|&n| n != dim) {
        return Err(err(
            1,
            format!("header declares {dim} coordinates, expected {n}"),
        ));
    }
    let mut real = Vec::new();
    let mut cplx = Vec::new();
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let vals = line
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|e| err(ln, format!("'{c}': {e}")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if vals.len() != cols.len() {
            return Err(err(
                ln,
                format!("{} values, header has {}", vals.len(), cols.len()),
            ));
        }
        if complex {
            cplx.push(vals.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect());
        } else {
            real.push(vals);
        }
    }
    let spec = Value::Null;
    Ok(if complex {
        DataBatch::complex(spec, None, dim, cplx)
    } else {
        DataBatch::real(spec, None, dim, real)
    })
}

/// Line of the first occurrence of `"rows"`, for pointing at bad rows.
fn rows_line(text: &str) -> usize {
    text.lines()
        .position(|l| l.contains("\"rows\""))
        .map_or(1, |i| i + 1)
}

pub fn parse_json(text: &str, name: &str, expect_dim: Option<usize>) -> Result<DataBatch, IoError> {
    let err = |line: usize, msg: String| IoError::Parse {
        path: name.to_string(),
        line,
        msg,
    };
    let v: Value = serde_json::from_str(text).map_err(|e| err(e.line(), e.to_string()))?;
    let line = rows_line(text);
    let obj = v
        .as_object()
        .ok_or_else(|| err(1, "expected an object with spec, seed and rows".into()))?;
    if let Some(k) = obj
        .keys()
        .find(|k| !["spec", "seed", "dim", "rows"].contains(&k.as_str()))
    {
        return Err(err(1, format!("unknown key '{k}'")));
    }
    let seed = match obj.get("seed") {
        None | Some(Value::Null) => None,
        Some(s) => Some(
            s.as_u64()
                .ok_or_else(|| err(1, "seed is not an unsigned integer".into()))?,
        ),
    };
    let rows = obj
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| err(line, "missing rows array".into()))?;
    let declared = obj.get("dim").and_then(Value::as_u64).map(|d| d as usize);
    let first = rows.first().and_then(Value::as_array);
    let complex = first.and_then(|r| r.first()).is_some_and(Value::is_array);
    let dim = declared
        .or(first.map(Vec::len))
        .ok_or_else(|| err(line, "empty batch without dim".into()))?;
    if let Some(n) = expect_dim.filter(|&n| n != dim) {
        return Err(err(
            line,
            format!("batch has {dim} coordinates, expected {n}"),
        ));
    }
    let number = |x: &Value, i: usize| {
        x.as_f64()
            .ok_or_else(|| err(line, format!("row {i}: non-numeric value {x}")))
    };
    let mut real = Vec::new();
    let mut cplx = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let r = r
            .as_array()
            .ok_or_else(|| err(line, format!("row {i} is not an array")))?;
        if r.len() != dim {
            return Err(err(
                line,
                format!("row {i} has {} values, expected {dim}", r.len()),
            ));
        }
        if complex {
            let z = r
                .iter()
                .map(|pair| match pair.as_array().map(Vec::as_slice) {
                    Some([re, im]) => Ok(Complex64::new(number(re, i)?, number(im, i)?)),
                    _ => Err(err(line, format!("row {i}: expected [re, im] pairs"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            cplx.push(z);
        } else {
            real.push(
                r.iter()
                    .map(|x| number(x, i))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
    }
    let spec = obj.get("spec").cloned().unwrap_or(Value::Null);
    Ok(if complex {
        DataBatch::complex(spec, seed, dim, cplx)
    } else {
        DataBatch::real(spec, seed, dim, real)
    })
}

/// Histogram of every column as CSV rows `column,lo,hi,count`.
pub fn histogram_csv(columns: &[(String, Vec<f64>, f64, f64)], bins: usize) -> String {
    let mut out = String::from("column,lo,hi,count\n");
    for (name, values, lo, hi) in columns {
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &v in values {
            if v >= *lo && v <= *hi {
                let b = (((v - lo) / width) as usize).min(bins - 1);
                counts[b] += 1;
            }
        }
        for (b, c) in counts.iter().enumerate() {
            let a = lo + b as f64 * width;
            writeln!(out, "{name},{},{},{c}", num(a), num(a + width)).unwrap();
        }
    }
    out
}
