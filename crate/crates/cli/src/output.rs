//! Versioned JSON envelopes and CSV tables, written to a file or stdout.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Everything a command produces; `violation` turns into exit code 2 after
/// the output is written.
pub struct Emit {
    pub command: &'static str,
    pub body: Map<String, Value>,
    pub table: Table,
    pub violation: Option<String>,
}

impl Emit {
    pub fn new(command: &'static str, table: Table) -> Self {
        Emit { command, body: Map::new(), table, violation: None }
    }

    pub fn with(mut self, key: &str, value: impl serde::Serialize) -> Self {
        self.body.insert(key.to_string(), serde_json::to_value(value).expect("serializable output"));
        self
    }

    fn envelope(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), json!(SCHEMA));
        m.insert("command".into(), json!(self.command));
        for (k, v) in &self.body {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        let mut sink: Box<dyn Write> = match out {
            Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        };
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut sink, &self.envelope())?;
                writeln!(sink)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut sink);
                w.write_record(&self.table.header)?;
                for row in &self.table.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
        }
        sink.flush()
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
