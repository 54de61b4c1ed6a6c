//! CSV and JSON documents written by the command-line tool.
//!
//! CSV output starts with `# key: value` metadata lines, then a header row.
//! JSON output is `{"metadata": ..., "payload": ...}`.

use std::io::{self, Write};

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Metadata {
    pub fn new(command: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            seed,
        }
    }
}

/// Rows of pre-formatted cells under a header.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_f64(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| v.to_string()).collect());
    }
}

/// A table for CSV plus the structured payload used for `--json`.
#[derive(Debug, Clone)]
pub struct Document {
    pub table: Table,
    pub json: serde_json::Value,
}

impl Document {
    pub fn from_table(table: Table) -> Self {
        let json = serde_json::to_value(&table).expect("tables serialize");
        Self { table, json }
    }

    pub fn with_payload<T: Serialize>(table: Table, payload: &T) -> serde_json::Result<Self> {
        Ok(Self {
            table,
            json: serde_json::to_value(payload)?,
        })
    }
}

pub fn write_csv<W: Write>(mut w: W, meta: &Metadata, table: &Table) -> io::Result<()> {
    writeln!(w, "# tool: {} {}", meta.tool, meta.version)?;
    writeln!(w, "# command: {}", meta.command)?;
    if let Some(seed) = meta.seed {
        writeln!(w, "# seed: {seed}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(&table.columns)?;
    for row in &table.rows {
        csv.write_record(row)?;
    }
    csv.flush()
}

pub fn write_json<W: Write>(mut w: W, meta: &Metadata, payload: &serde_json::Value) -> io::Result<()> {
    #[derive(Serialize)]
    struct Doc<'a> {
        metadata: &'a Metadata,
        payload: &'a serde_json::Value,
    }
    serde_json::to_writer_pretty(
        &mut w,
        &Doc {
            metadata: meta,
            payload,
        },
    )?;
    writeln!(w)
}
