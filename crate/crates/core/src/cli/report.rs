//! Report rendering: JSON with 17 significant digits, CSV with `#` footers.

use serde::Serialize;
use serde_json::{Map, Number, Value};

/// Outcome of one identity over all evaluated points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub anchor: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub points: usize,
}

impl CheckResult {
    /// `passed` is `max_residual < tolerance`; a NaN residual fails.
    pub fn new(name: &str, anchor: &str, max_residual: f64, tolerance: f64, points: usize) -> Self {
        CheckResult {
            name: name.to_string(),
            anchor: anchor.to_string(),
            max_residual,
            tolerance,
            passed: max_residual < tolerance,
            points,
        }
    }

    pub fn to_json(&self) -> Value {
        object([
            ("name", Value::String(self.name.clone())),
            ("anchor", Value::String(self.anchor.clone())),
            ("max_residual", real(self.max_residual)),
            ("tolerance", real(self.tolerance)),
            ("passed", Value::Bool(self.passed)),
            ("points", Value::from(self.points)),
        ])
    }
}

/// A real as a JSON number with 17 significant digits; non-finite values become `null`.
pub fn real(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    match format!("{x:.16e}").parse::<Number>() {
        Ok(n) => Value::Number(n),
        Err(_) => Value::Null,
    }
}

/// Fixed 17-significant-digit text for CSV cells.
pub fn real_text(x: f64) -> String {
    if x.is_finite() {
        real(x).to_string()
    } else {
        "NaN".to_string()
    }
}

pub fn object<const N: usize>(entries: [(&str, Value); N]) -> Value {
    let mut map = Map::new();
    for (k, v) in entries {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}

pub fn to_json_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// A rectangular CSV table plus `#`-prefixed footer lines.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<String>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn render(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        let mut out = String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 cells");
        for line in &self.footer {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}
