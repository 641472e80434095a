use serde::Serialize;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::CliResult;

pub const SCHEMA: u32 = 1;

/// Shortest decimal that parses back to `x`; exponent form outside
/// `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// One CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_err(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e.to_string())
}

/// Pass/fail of one checked property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Invariant {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Invariant {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// What an experiment produces before the run metadata is attached.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Map<String, Value>,
    pub tables: Vec<Table>,
    pub invariants: Vec<Invariant>,
}

impl Outcome {
    pub fn result(&mut self, key: &str, v: impl Serialize) {
        self.results.insert(key.into(), serde_json::to_value(v).expect("serializable result"));
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.invariants.push(Invariant::new(name, passed, detail));
    }
}

#[derive(Debug)]
pub struct Report {
    pub config: BTreeMap<String, String>,
    pub outcome: Outcome,
    pub runtime_seconds: Option<f64>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.outcome.invariants.iter().all(|i| i.passed)
    }

    pub fn summary(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "config": self.config,
            "results": self.outcome.results,
            "invariants": self.outcome.invariants,
            "runtime_seconds": self.runtime_seconds,
        })
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary()).expect("json");
        s.push('\n');
        s
    }

    /// Writes `summary.json` and one `<name>.csv` per table into `dir`.
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        fs::create_dir_all(dir)?;
        for t in &self.outcome.tables {
            fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv()?)?;
        }
        fs::write(dir.join("summary.json"), self.summary_json())?;
        Ok(())
    }
}
