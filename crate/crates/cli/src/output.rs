//! Artifact assembly: schema envelope, 12-digit numbers, JSON or CSV.

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::Format;

pub const SCHEMA: &str = "koblab/1";

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub category: String,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            category: "parse".into(),
            message: message.into(),
        }
    }
}

impl From<String> for CliError {
    fn from(message: String) -> Self {
        CliError::parse(message)
    }
}

impl From<koblab::Error> for CliError {
    fn from(e: koblab::Error) -> Self {
        let code = match e {
            koblab::Error::Parse(_) | koblab::Error::Argument(_) => 2,
            _ => 3,
        };
        CliError {
            code,
            category: e.category().into(),
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError {
            code: 3,
            category: "internal".into(),
            message: e.to_string(),
        }
    }
}

pub struct Report {
    fields: Map<String, Value>,
    body: Value,
    table: Option<Vec<Value>>,
}

impl Report {
    pub fn new(command: &str, body: Value) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), SCHEMA.into());
        fields.insert("command".into(), command.into());
        Report {
            fields,
            body,
            table: None,
        }
    }

    pub fn with(mut self, key: &str, v: &impl Serialize) -> Self {
        let v = serde_json::to_value(v).unwrap_or(Value::Null);
        self.fields.insert(key.into(), v);
        self
    }

    /// Rows for CSV output; JSON output ignores them.
    pub fn with_table(mut self, rows: Vec<Value>) -> Self {
        self.table = Some(rows);
        self
    }

    fn json(self) -> Value {
        let mut out = self.fields;
        match self.body {
            Value::Object(m) => out.extend(m),
            other => {
                out.insert("result".into(), other);
            }
        }
        Value::Object(out)
    }
}

/// Round every float to 12 significant digits.
fn round(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            if let Some(num) = serde_json::Number::from_f64(r) {
                *n = num;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round),
        Value::Object(m) => m.values_mut().for_each(round),
        _ => {}
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_text(rows: &[Value]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError {
        code: 3,
        category: "internal".into(),
        message: e.to_string(),
    };
    if let Some(Value::Object(first)) = rows.first() {
        w.write_record(first.keys()).map_err(internal)?;
    }
    for row in rows {
        if let Value::Object(m) = row {
            w.write_record(m.values().map(cell)).map_err(internal)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError {
        code: 3,
        category: "internal".into(),
        message: e.to_string(),
    })?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn render(report: Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut v = report.json();
            round(&mut v);
            Ok(format!("{}\n", serde_json::to_string_pretty(&v)?))
        }
        Format::Csv => {
            let mut report = report;
            let rows = match report.table.take() {
                Some(rows) => rows,
                None => {
                    // one row of the scalar fields
                    let Value::Object(m) = report.json() else {
                        unreachable!()
                    };
                    let flat: Map<String, Value> = m
                        .into_iter()
                        .filter(|(_, v)| !v.is_array() && !v.is_object())
                        .collect();
                    vec![Value::Object(flat)]
                }
            };
            let mut rows = rows;
            rows.iter_mut().for_each(round);
            csv_text(&rows)
        }
    }
}

pub fn emit(
    command: &str,
    result: Result<Report, CliError>,
    format: Format,
    out: Option<&str>,
) -> ExitCode {
    let outcome = result.and_then(|r| render(r, format)).and_then(|text| {
        match out {
            Some(path) => fs::write(path, text),
            None => io::stdout().write_all(text.as_bytes()),
        }
        .map_err(|e| CliError {
            code: 3,
            category: "io".into(),
            message: e.to_string(),
        })
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let v = serde_json::json!({
                "schema": SCHEMA,
                "command": command,
                "error": { "category": e.category, "message": e.message },
            });
            println!("{v}");
            eprintln!("koblab {command}: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
