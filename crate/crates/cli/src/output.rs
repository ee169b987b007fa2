use std::io::{self, Write};

use altsum_core::rational::{format_rational, Rational};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// 17 significant digits; non-finite values become `null`.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    serde_json::from_str(&float_text(x)).expect("formatted float is valid JSON")
}

pub fn opt_float(x: Option<f64>) -> Value {
    x.map_or(Value::Null, float)
}

pub fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| float(x)).collect())
}

pub fn float_text(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

pub fn rational(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

/// Flat rows used by `--format csv`.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub struct Report {
    pub config: Value,
    pub result: Value,
    pub diagnostics: Value,
    pub table: Table,
}

impl Report {
    pub fn write(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Json => {
                let doc = json!({
                    "config": self.config,
                    "result": self.result,
                    "diagnostics": self.diagnostics,
                });
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let io_err = |e: csv::Error| match e.into_kind() {
                    csv::ErrorKind::Io(e) => e,
                    other => io::Error::other(format!("{other:?}")),
                };
                w.write_record(&self.table.header).map_err(io_err)?;
                for row in &self.table.rows {
                    w.write_record(row).map_err(io_err)?;
                }
                w.flush()
            }
        }
    }
}
