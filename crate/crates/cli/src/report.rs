//! Deterministic report emission: `report.json`, CSV tables and `summary.txt`.

use std::fs;
use std::path::Path;

use deadcore::csv::{fmt_num, round_sig, Table};
use deadcore::model::{ModelSpec, Violation};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub verb: String,
    pub spec: Option<ModelSpec>,
    pub admissible: Option<bool>,
    pub violations: Vec<Violation>,
    pub results: Map<String, Value>,
    pub artifacts: Vec<String>,
    #[serde(skip)]
    tables: Vec<(String, String)>,
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl Report {
    pub fn new(verb: &str, spec: Option<ModelSpec>) -> Self {
        Self {
            verb: verb.to_string(),
            spec,
            admissible: None,
            violations: Vec::new(),
            results: Map::new(),
            artifacts: Vec::new(),
            tables: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn insert<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).expect("report values are plain data");
        self.results.insert(key.to_string(), v);
    }

    /// Records a scalar in the results and as a summary line.
    pub fn scalar(&mut self, key: &str, value: f64) {
        self.insert(key, value);
        self.summary.push(format!("{key} = {}", fmt_num(value)));
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.summary.push(text.into());
    }

    pub fn add_table(&mut self, name: &str, table: &Table) {
        self.add_csv(name, table.to_csv());
    }

    pub fn add_csv(&mut self, name: &str, csv: String) {
        self.artifacts.push(name.to_string());
        self.tables.push((name.to_string(), csv));
    }
}

/// Floats rounded to 12 significant digits; non-finite values become `null`.
fn rounded(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(rounded).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

/// The serialized (snake_case) name of a unit enum.
fn kind_name<T: Serialize>(kind: &T) -> String {
    match serde_json::to_value(kind) {
        Ok(Value::String(s)) => s,
        _ => String::new(),
    }
}

fn summary_text(report: &Report) -> String {
    let mut out = format!("deadcore {}\n", report.verb);
    if let Some(spec) = &report.spec {
        out.push_str(&format!(
            "spec: beta={} m={} q={} gamma={} alpha={} lambda={} c={} d={} hamiltonian={} nonlinearity={}\n",
            fmt_num(spec.beta),
            fmt_num(spec.m),
            fmt_num(spec.q),
            fmt_num(spec.gamma),
            fmt_num(spec.alpha),
            fmt_num(spec.lambda),
            fmt_num(spec.c),
            fmt_num(spec.d),
            kind_name(&spec.hamiltonian),
            kind_name(&spec.nonlinearity),
        ));
    }
    match report.admissible {
        Some(true) => out.push_str("admissible: yes, all constraints satisfied\n"),
        Some(false) => {
            out.push_str("admissible: no\n");
            for v in &report.violations {
                out.push_str(&format!("  violated: {}\n", v.message));
            }
        }
        None => {}
    }
    for line in &report.summary {
        out.push_str(line);
        out.push('\n');
    }
    if !report.artifacts.is_empty() {
        out.push_str(&format!("artifacts: {}\n", report.artifacts.join(", ")));
    }
    out
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Unwritable(format!("{}: {e}", path.display())))
}

/// Writes every table, `report.json` and `summary.txt` into `dir`.
pub fn emit_report(report: &Report, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Unwritable(format!("{}: {e}", dir.display())))?;
    for (name, csv) in &report.tables {
        write(dir, name, csv)?;
    }
    let json = rounded(serde_json::to_value(report).expect("report is plain data"));
    let mut text = serde_json::to_string_pretty(&json).expect("report is plain data");
    text.push('\n');
    write(dir, "report.json", &text)?;
    write(dir, "summary.txt", &summary_text(report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_integers_and_nulls_non_finite() {
        let v = serde_json::json!({"a": 1, "b": 0.1 + 0.2, "c": [2.0f64.sqrt()]});
        let r = rounded(v);
        assert_eq!(r["a"], Value::from(1));
        assert_eq!(r["b"], Value::from(0.3));
        assert_eq!(r["c"][0].to_string(), "1.41421356237");
        let mut rep = Report::new("x", None);
        rep.insert("nan", f64::NAN);
        assert_eq!(rounded(serde_json::to_value(&rep).unwrap())["results"]["nan"], Value::Null);
    }
}
