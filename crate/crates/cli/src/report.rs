//! JSON reports. The JSON document is the contract; the pretty form is
//! rendered from it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use oprange::linrel::LinearRelation;
use oprange::{Mode, Subspace, Tolerance};
use serde_json::{json, Map, Value};

use crate::io::{matrix_json, Format, Scalar};

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone)]
pub struct InputRecord {
    pub role: String,
    pub path: String,
    pub format: Format,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub mode: Mode,
    pub inputs: Vec<InputRecord>,
    pub tolerances: Tolerance,
    pub results: Value,
    pub verification: BTreeMap<String, bool>,
    pub finite_dim_collapse: Option<bool>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let inputs: Vec<Value> = self
            .inputs
            .iter()
            .map(|i| {
                let mut m = Map::new();
                m.insert("role".into(), json!(i.role));
                m.insert("path".into(), json!(i.path));
                m.insert("format".into(), json!(i.format.as_str()));
                if let (Some(r), Some(c)) = (i.rows, i.cols) {
                    m.insert("rows".into(), json!(r));
                    m.insert("cols".into(), json!(c));
                }
                Value::Object(m)
            })
            .collect();
        let mut root = Map::new();
        root.insert("schema_version".into(), json!(SCHEMA_VERSION));
        root.insert("command".into(), json!(self.command));
        root.insert(
            "inputs".into(),
            json!({"mode": self.mode.as_str(), "files": inputs}),
        );
        root.insert(
            "tolerances".into(),
            json!({"rank_rtol": self.tolerances.rank_rtol, "eq_atol": self.tolerances.eq_atol}),
        );
        root.insert("results".into(), self.results.clone());
        root.insert("verification".into(), json!(self.verification));
        if let Some(flag) = self.finite_dim_collapse {
            root.insert("finite_dim_collapse".into(), json!(flag));
        }
        canonical(Value::Object(root))
    }
}

/// Rebuilds every object with its keys in sorted order.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let sorted: BTreeMap<String, Value> =
                map.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonical).collect()),
        other => other,
    }
}

pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

fn is_matrix(v: &Value) -> bool {
    v.get("data").is_some_and(Value::is_array) && v.get("rows").is_some() && v.get("cols").is_some()
}

fn pretty_into(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if is_matrix(v) {
        let _ = writeln!(out, "{pad}{key}: {}x{}", v["rows"], v["cols"]);
        for row in v["data"].as_array().into_iter().flatten() {
            let cells: Vec<String> = row
                .as_array()
                .into_iter()
                .flatten()
                .map(scalar_text)
                .collect();
            let _ = writeln!(out, "{pad}  [{}]", cells.join(", "));
        }
        return;
    }
    match v {
        Value::Object(map) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, child) in map {
                pretty_into(out, k, child, depth + 1);
            }
        }
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            let cells: Vec<String> = items.iter().map(scalar_text).collect();
            let _ = writeln!(out, "{pad}{key}: [{}]", cells.join(", "));
        }
        Value::Array(items) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (i, child) in items.iter().enumerate() {
                pretty_into(out, &format!("[{i}]"), child, depth + 1);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {}", scalar_text(other));
        }
    }
}

/// Indented text rendering of a report.
pub fn render_pretty(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                pretty_into(&mut out, k, child, 0);
            }
        }
        other => pretty_into(&mut out, "value", other, 0),
    }
    out
}

pub fn subspace_json<F: Scalar>(s: &Subspace<F>) -> Value {
    json!({"ambient_dim": s.ambient_dim(), "rank": s.rank(), "basis": matrix_json(s.basis())})
}

pub fn relation_json<F: Scalar>(r: &LinearRelation<F>, tol: &Tolerance) -> Value {
    json!({
        "dim_h": r.dim_h(),
        "dim_k": r.dim_k(),
        "graph": subspace_json(r.graph()),
        "domain": subspace_json(&r.dom(tol)),
        "range": subspace_json(&r.ran(tol)),
        "kernel": subspace_json(&r.ker(tol)),
        "multivalued_part": subspace_json(&r.mul(tol)),
        "is_operator": r.is_operator(tol),
    })
}
