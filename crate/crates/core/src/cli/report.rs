use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use super::config::{Format, RunConfig};
use crate::checks::{Check, Status};
use crate::error::Result;

pub const EXIT_OK: i32 = 0;
pub const EXIT_THEOREM_FAILED: i32 = 1;
pub const EXIT_ANALYSIS_ONLY: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// A per-sample table for CSV output.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub status: &'static str,
    pub exit_code: i32,
    pub checks: Vec<Check>,
    pub results: Map<String, Value>,
    #[serde(skip)]
    pub table: Option<Table>,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: config.command.clone(),
            config,
            status: "pass",
            exit_code: EXIT_OK,
            checks: Vec::new(),
            results: Map::new(),
            table: None,
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn put<T: Serialize>(&mut self, key: &str, value: &T) -> Result<()> {
        let v = serde_json::to_value(value).map_err(|e| crate::Error::invalid(e.to_string()))?;
        self.results.insert(key.to_string(), v);
        Ok(())
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        self.checks.extend(cs);
    }

    /// Settle the exit code: a failed theorem-backed check wins over an
    /// analysis-only stage.
    pub fn finish(&mut self) {
        let bug = self.checks.iter().any(Check::is_bug);
        let scaled = self.checks.iter().any(|c| c.status == Status::AnalysisOnly);
        (self.status, self.exit_code) = if bug {
            ("fail", EXIT_THEOREM_FAILED)
        } else if scaled {
            ("analysis-only", EXIT_ANALYSIS_ONLY)
        } else {
            ("pass", EXIT_OK)
        };
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, self)
                    .map_err(|e| crate::Error::invalid(e.to_string()))?;
                out.push(b'\n');
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut out);
                let csv_err = |e: csv::Error| crate::Error::invalid(e.to_string());
                match &self.table {
                    Some(t) => {
                        w.write_record(&t.header).map_err(csv_err)?;
                        for r in &t.rows {
                            w.write_record(r).map_err(csv_err)?;
                        }
                    }
                    None => {
                        w.write_record(["tag", "name", "basis", "status", "detail"]).map_err(csv_err)?;
                        for c in &self.checks {
                            w.write_record([
                                c.tag.as_str(),
                                &c.name,
                                &enum_str(&c.basis),
                                &enum_str(&c.status),
                                &c.detail,
                            ])
                            .map_err(csv_err)?;
                        }
                    }
                }
                w.flush()?;
            }
            Format::Text => {
                writeln!(out, "{} {} {}", self.tool, self.version, self.command)?;
                writeln!(out, "status: {} (exit {})", self.status, self.exit_code)?;
                for c in &self.checks {
                    writeln!(
                        out,
                        "  [{:<13}] {:<20} {:<10} {}: {}",
                        enum_str(&c.status),
                        c.tag.as_str(),
                        enum_str(&c.basis),
                        c.name,
                        c.detail
                    )?;
                }
                for (k, v) in &self.results {
                    if let Some(text) = summary(v) {
                        writeln!(out, "  {k}: {text}")?;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn enum_str<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        _ => String::new(),
    }
}

/// One-line rendering of scalar results and small flat objects.
fn summary(v: &Value) -> Option<String> {
    match v {
        Value::Number(_) | Value::Bool(_) | Value::String(_) => Some(v.to_string()),
        Value::Object(m) => {
            let parts: Vec<String> = m
                .iter()
                .filter(|(_, x)| matches!(x, Value::Number(_) | Value::Bool(_) | Value::String(_)))
                .map(|(k, x)| format!("{k}={x}"))
                .collect();
            (!parts.is_empty()).then(|| parts.join(" "))
        }
        _ => None,
    }
}
