use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A rectangular result with unit-annotated column names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Resolved parameters, derived angles and run settings, shared by every artifact header.
pub fn run_header(command: &str, cfg: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("scheme".into(), json!(cfg.scheme.name()));
    m.insert("params".into(), json!(cfg.params));
    m.insert("angles".into(), json!(cfg.params.angles()));
    m.insert("steps".into(), json!(cfg.steps));
    m.insert("seed".into(), json!(cfg.seed));
    m.insert("initial_state".into(), json!(cfg.initial_state));
    m.insert("gauge".into(), json!(cfg.gauge_source.as_ref().map(|p| p.display().to_string())));
    if matches!(cfg.scheme, crate::schemes::Scheme::TwoAngle) {
        m.insert("kappa".into(), json!(cfg.kappa));
    }
    m
}

pub struct Emitter {
    pub dir: PathBuf,
    pub format: Format,
    pub header: Map<String, Value>,
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Emitter {
    pub fn new(dir: &Path, format: Format, header: Map<String, Value>) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Emitter { dir: dir.to_path_buf(), format, header })
    }

    /// Writes `table` as `<name>.csv` (header as `#` lines) or `<name>.json`.
    pub fn write(&self, table: &Table) -> Result<PathBuf, CliError> {
        match self.format {
            Format::Csv => {
                let path = self.dir.join(format!("{}.csv", table.name));
                let mut w = BufWriter::new(File::create(&path)?);
                for (k, v) in &self.header {
                    writeln!(w, "# {k}: {v}")?;
                }
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(&table.columns)?;
                for row in &table.rows {
                    csv.write_record(row.iter().map(cell))?;
                }
                csv.flush()?;
                Ok(path)
            }
            Format::Json => self.write_json(&table.name, &json!({ "columns": table.columns, "rows": table.rows })),
        }
    }

    /// Writes `<name>.json` with the header merged in, whatever the format.
    pub fn write_json(&self, name: &str, body: &Value) -> Result<PathBuf, CliError> {
        let path = self.dir.join(format!("{name}.json"));
        let doc = json!({ "header": self.header, "body": body });
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        w.flush()?;
        Ok(path)
    }
}
