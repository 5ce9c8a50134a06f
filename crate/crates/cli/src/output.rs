//! Rendering of command results as CSV or JSON with a fixed number of decimals.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// What a command produces: a table (one CSV row per record, a JSON array of
/// objects) or a single JSON object (a `field,value` table in CSV).
pub enum Output {
    Table {
        header: Vec<&'static str>,
        rows: Vec<Vec<Cell>>,
    },
    Object(Value),
}

impl Output {
    pub fn render(&self, format: Format, precision: usize) -> String {
        match (self, format) {
            (Output::Table { header, rows }, Format::Csv) => {
                let mut s = header.join(",");
                s.push('\n');
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|c| cell_text(c, precision)).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            (Output::Table { header, rows }, Format::Json) => {
                let records = rows
                    .iter()
                    .map(|row| {
                        let map: Map<String, Value> = header
                            .iter()
                            .zip(row)
                            .map(|(h, c)| (h.to_string(), cell_json(c, precision)))
                            .collect();
                        Value::Object(map)
                    })
                    .collect();
                pretty(&Value::Array(records))
            }
            (Output::Object(v), Format::Json) => pretty(&round_json(v, precision)),
            (Output::Object(v), Format::Csv) => {
                let mut s = String::from("field,value\n");
                if let Value::Object(map) = round_json(v, precision) {
                    for (k, v) in map {
                        let text = match v {
                            Value::String(t) => t,
                            other => other.to_string(),
                        };
                        let _ = writeln!(s, "{k},{}", csv_escape(&text));
                    }
                }
                s
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are finite");
    s.push('\n');
    s
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn fixed(x: f64, precision: usize) -> String {
    let s = format!("{x:.precision$}");
    // avoid printing "-0.000"
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn cell_text(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Real(x) => fixed(*x, precision),
        Cell::Text(t) => csv_escape(t),
    }
}

fn rounded(x: f64, precision: usize) -> Value {
    let y: f64 = fixed(x, precision).parse().expect("formatted float parses");
    Number::from_f64(y).map_or(Value::Null, Value::Number)
}

fn cell_json(c: &Cell, precision: usize) -> Value {
    match c {
        Cell::Int(v) => Value::from(*v),
        Cell::Real(x) => rounded(*x, precision),
        Cell::Text(t) => Value::String(t.clone()),
    }
}

/// Rounds every non-integer number in `v` to `precision` decimals.
pub fn round_json(v: &Value, precision: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => rounded(n.as_f64().unwrap(), precision),
        Value::Array(a) => Value::Array(a.iter().map(|x| round_json(x, precision)).collect()),
        Value::Object(m) => Value::Object(
            m.iter()
                .map(|(k, x)| (k.clone(), round_json(x, precision)))
                .collect(),
        ),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn fixed_decimals() {
        assert_eq!(fixed(1.0 / 3.0, 8), "0.33333333");
        assert_eq!(fixed(-1e-12, 4), "0.0000");
        assert_eq!(fixed(-0.5, 2), "-0.50");
    }

    #[test]
    fn table_csv_and_json() {
        let out = Output::Table {
            header: vec!["k", "probability"],
            rows: vec![vec![0usize.into(), 0.25.into()], vec![1usize.into(), 0.75.into()]],
        };
        assert_eq!(out.render(Format::Csv, 3), "k,probability\n0,0.250\n1,0.750\n");
        let v: Value = serde_json::from_str(&out.render(Format::Json, 3)).unwrap();
        assert_eq!(v, json!([{"k": 0, "probability": 0.25}, {"k": 1, "probability": 0.75}]));
    }

    #[test]
    fn object_csv_quotes_nested_values() {
        let out = Output::Object(json!({"a": 1, "b": [0.123456, 2.0], "c": "x"}));
        assert_eq!(out.render(Format::Csv, 2), "field,value\na,1\nb,\"[0.12,2.0]\"\nc,x\n");
    }
}
