//! Matrix files: Matrix Market (array or coordinate), CSV and JSON.
//!
//! Entries are kept as text until the scalar mode is known, so that exact
//! mode reads decimals and `p/q` fractions without rounding.

use std::fmt::Write as _;
use std::path::Path;

use oprange::linalg::{parse_rational, rational_to_f64};
use oprange::{Field, Matrix, Rational};
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    MatrixMarket,
    Csv,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_ascii_lowercase();
        match ext.as_str() {
            "mtx" | "mm" => Ok(Format::MatrixMarket),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::parse(
                path,
                "unknown file extension; expected .mtx, .csv or .json",
            )),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Format::MatrixMarket => "matrix-market",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A parsed matrix whose entries are still text, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
    pub format: Format,
}

pub fn read_matrix_file(path: &Path) -> Result<RawMatrix, CliError> {
    let format = Format::from_path(path)?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix(&text, format).map_err(|msg| CliError::parse(path, msg))
}

pub fn parse_matrix(text: &str, format: Format) -> Result<RawMatrix, String> {
    match format {
        Format::MatrixMarket => parse_mtx(text),
        Format::Csv => parse_csv(text),
        Format::Json => parse_json(text),
    }
}

fn parse_csv(text: &str) -> Result<RawMatrix, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = 0;
    let mut cols = None;
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(format!(
                    "row {} has {} entries, expected {c}",
                    rows + 1,
                    record.len()
                ));
            }
            _ => {}
        }
        for field in record.iter() {
            if field.is_empty() {
                return Err(format!("empty entry in row {}", rows + 1));
            }
            entries.push(field.to_string());
        }
        rows += 1;
    }
    if rows == 0 {
        return Err("no rows".into());
    }
    Ok(RawMatrix {
        rows,
        cols: cols.unwrap_or(0),
        entries,
        format: Format::Csv,
    })
}

fn json_entry(v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(format!(
            "matrix entry {other} is neither a number nor a string"
        )),
    }
}

fn json_rows(data: &Value) -> Result<Vec<Vec<String>>, String> {
    let rows = data
        .as_array()
        .ok_or("matrix data must be an array of rows")?;
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| "each row must be an array".to_string())?
                .iter()
                .map(json_entry)
                .collect()
        })
        .collect()
}

/// Accepts `[[..], ..]` or `{"rows": r, "cols": c, "data": [[..], ..]}`.
fn parse_json(text: &str) -> Result<RawMatrix, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let (rows, declared_cols) = match &value {
        Value::Array(_) => (json_rows(&value)?, None),
        Value::Object(map) => {
            let data = map.get("data").ok_or("missing \"data\"")?;
            let rows = json_rows(data)?;
            let dim = |key: &str| -> Result<Option<usize>, String> {
                match map.get(key) {
                    None => Ok(None),
                    Some(v) => v
                        .as_u64()
                        .map(|n| Some(n as usize))
                        .ok_or_else(|| format!("\"{key}\" must be a nonnegative integer")),
                }
            };
            if let Some(r) = dim("rows")? {
                if r != rows.len() {
                    return Err(format!("\"rows\" is {r} but data has {} rows", rows.len()));
                }
            }
            (rows, dim("cols")?)
        }
        _ => return Err("expected an array of rows or an object with \"data\"".into()),
    };
    let cols = match (rows.first(), declared_cols) {
        (Some(first), _) => first.len(),
        (None, Some(c)) => c,
        (None, None) => return Err("empty matrix needs explicit \"cols\"".into()),
    };
    if let Some(c) = declared_cols {
        if c != cols {
            return Err(format!("\"cols\" is {c} but rows have {cols} entries"));
        }
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(format!(
            "row {} has {} entries, expected {cols}",
            i + 1,
            rows[i].len()
        ));
    }
    Ok(RawMatrix {
        rows: rows.len(),
        cols,
        entries: rows.into_iter().flatten().collect(),
        format: Format::Json,
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

fn parse_mtx(text: &str) -> Result<RawMatrix, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let words: Vec<String> = header
        .split_whitespace()
        .map(|w| w.to_ascii_lowercase())
        .collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err("missing %%MatrixMarket matrix header".into());
    }
    let coordinate = match words[2].as_str() {
        "array" => false,
        "coordinate" => true,
        other => return Err(format!("unsupported layout '{other}'")),
    };
    if !matches!(words[3].as_str(), "real" | "integer" | "double") {
        return Err(format!("unsupported field '{}'", words[3]));
    }
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(format!("unsupported symmetry '{other}'")),
    };
    let mut body = lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size: Vec<usize> = body
        .next()
        .ok_or("missing size line")?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| format!("bad size entry '{t}'")))
        .collect::<Result<_, _>>()?;
    let (rows, cols) = match (coordinate, size.as_slice()) {
        (false, [r, c]) | (true, [r, c, _]) => (*r, *c),
        _ => return Err("malformed size line".into()),
    };
    if symmetry != Symmetry::General && rows != cols {
        return Err("symmetric storage requires a square matrix".into());
    }
    let mut entries = vec!["0".to_string(); rows * cols];
    let negate = |s: &str| match s.strip_prefix('-') {
        Some(rest) => rest.to_string(),
        None => format!("-{s}"),
    };
    let mut place = |i: usize, j: usize, v: String| {
        match symmetry {
            Symmetry::General => {}
            Symmetry::Symmetric => entries[j * cols + i] = v.clone(),
            Symmetry::Skew => entries[j * cols + i] = negate(&v),
        }
        entries[i * cols + j] = v;
    };
    if coordinate {
        let nnz = size[2];
        for _ in 0..nnz {
            let line = body.next().ok_or("fewer entries than declared")?;
            let t: Vec<&str> = line.split_whitespace().collect();
            let [i, j, v] = t.as_slice() else {
                return Err(format!("malformed entry line '{line}'"));
            };
            let i: usize = i.parse().map_err(|_| format!("bad row index '{i}'"))?;
            let j: usize = j.parse().map_err(|_| format!("bad column index '{j}'"))?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(format!("index ({i}, {j}) out of range"));
            }
            place(i - 1, j - 1, v.to_string());
        }
    } else {
        let values: Vec<&str> = body.flat_map(str::split_whitespace).collect();
        // column-major; symmetric storage lists the lower triangle only
        let positions: Vec<(usize, usize)> = (0..cols)
            .flat_map(|j| {
                let start = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => j,
                    Symmetry::Skew => j + 1,
                };
                (start..rows).map(move |i| (i, j))
            })
            .collect();
        if values.len() != positions.len() {
            return Err(format!(
                "expected {} values, found {}",
                positions.len(),
                values.len()
            ));
        }
        for ((i, j), v) in positions.into_iter().zip(values) {
            place(i, j, v.to_string());
        }
        return Ok(RawMatrix {
            rows,
            cols,
            entries,
            format: Format::MatrixMarket,
        });
    }
    if body.next().is_some() {
        return Err("more entries than declared".into());
    }
    Ok(RawMatrix {
        rows,
        cols,
        entries,
        format: Format::MatrixMarket,
    })
}

/// Scalars that can be read from and written to matrix files and reports.
pub trait Scalar: Field {
    fn parse_entry(s: &str) -> Result<Self, String>;
    /// Text form: `p/q` (or `p`) for rationals, shortest round-trip decimal
    /// for floats.
    fn render(&self) -> String;
    fn to_json(&self) -> Value;
}

impl Scalar for Rational {
    fn parse_entry(s: &str) -> Result<Self, String> {
        parse_rational(s).map_err(|e| e.to_string())
    }

    fn render(&self) -> String {
        self.to_string()
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

impl Scalar for f64 {
    fn parse_entry(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let v = if s.contains('/') {
            rational_to_f64(&parse_rational(s).map_err(|e| e.to_string())?)
        } else {
            s.parse::<f64>()
                .map_err(|_| format!("cannot parse '{s}' as a number"))?
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("entry '{s}' is not finite"))
        }
    }

    fn render(&self) -> String {
        format!("{self}")
    }

    fn to_json(&self) -> Value {
        json!(self)
    }
}

impl RawMatrix {
    pub fn to_matrix<F: Scalar>(&self) -> Result<Matrix<F>, String> {
        let data = self
            .entries
            .iter()
            .map(|e| F::parse_entry(e))
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::new(self.rows, self.cols, data).map_err(|e| e.to_string())
    }
}

pub fn write_matrix<F: Scalar>(m: &Matrix<F>, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            for i in 0..m.rows() {
                let row: Vec<String> = (0..m.cols()).map(|j| m[(i, j)].render()).collect();
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        Format::Json => {
            out = serde_json::to_string(&matrix_json(m)).expect("serializable");
            out.push('\n');
        }
        Format::MatrixMarket => {
            let _ = writeln!(out, "%%MatrixMarket matrix array real general");
            let _ = writeln!(out, "{} {}", m.rows(), m.cols());
            for j in 0..m.cols() {
                for i in 0..m.rows() {
                    let _ = writeln!(out, "{}", m[(i, j)].render());
                }
            }
        }
    }
    out
}

/// `{"rows": r, "cols": c, "data": [[..], ..]}`.
pub fn matrix_json<F: Scalar>(m: &Matrix<F>) -> Value {
    let data: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array((0..m.cols()).map(|j| m[(i, j)].to_json()).collect()))
        .collect();
    json!({"rows": m.rows(), "cols": m.cols(), "data": data})
}
