//! Rendering of a run record as JSON, CSV or aligned text.

use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "pretty" | "text" => Ok(Format::Pretty),
            _ => Err(format!("unknown format '{s}' (json, csv or pretty)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Pretty => "pretty",
        })
    }
}

/// Rows for the CSV emitter: parameter columns, then `q`, then `count`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Everything a command reports.
#[derive(Debug, Clone)]
pub struct Record {
    pub command: String,
    pub params: Value,
    pub seed: u64,
    pub pass: bool,
    pub result: Map<String, Value>,
    pub table: Option<Table>,
}

impl Record {
    pub fn new(command: &str, params: Value, seed: u64) -> Self {
        Record { command: command.to_string(), params, seed, pass: true, result: Map::new(), table: None }
    }

    pub fn set(&mut self, key: &str, value: impl serde::Serialize) -> &mut Self {
        self.result.insert(key.to_string(), serde_json::to_value(value).expect("results serialize"));
        self
    }

    /// Merges the fields of a serializable report.
    pub fn merge(&mut self, report: impl serde::Serialize) -> &mut Self {
        match serde_json::to_value(report).expect("results serialize") {
            Value::Object(m) => self.result.extend(m),
            other => {
                self.result.insert("value".into(), other);
            }
        }
        self
    }

    fn json(&self) -> Value {
        let mut m = self.result.clone();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert("params".into(), self.params.clone());
        m.insert("seed".into(), Value::from(self.seed));
        m.insert("pass".into(), Value::Bool(self.pass));
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => format!("{}\n", self.json()),
            Format::Csv => self.csv(),
            Format::Pretty => self.pretty(),
        }
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.headers).expect("in-memory write");
                for r in &t.rows {
                    w.write_record(r).expect("in-memory write");
                }
            }
            None => {
                let Value::Object(m) = self.json() else { unreachable!() };
                w.write_record(m.keys()).expect("in-memory write");
                w.write_record(m.values().map(cell)).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
    }

    fn pretty(&self) -> String {
        let mut out = format!("{} [{}]\n", self.command, if self.pass { "pass" } else { "FAIL" });
        if let Value::Object(p) = &self.params {
            for (k, v) in p.iter().filter(|(_, v)| !v.is_null()) {
                out += &format!("  {k} = {}\n", cell(v));
            }
        }
        if let Some(t) = &self.table {
            let widths: Vec<usize> = (0..t.headers.len())
                .map(|i| t.rows.iter().map(|r| r[i].len()).chain([t.headers[i].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                format!("  {}\n", padded.join("  "))
            };
            out += &line(&t.headers);
            for r in &t.rows {
                out += &line(r);
            }
        }
        let width = self.result.keys().map(|k| k.len()).max().unwrap_or(0);
        for (k, v) in &self.result {
            out += &format!("{k:>width$}: {}\n", cell(v));
        }
        out
    }
}

/// A JSON value as a single CSV or text cell.
pub fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
