//! Verification reports: a row table plus a free-form summary, written as
//! CSV or as versioned JSON.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::fmt::Write as _;
use std::path::Path;

pub const SCHEMA: &str = "polygreen-report/1";
pub const CSV_HEADER: &str = "alpha,d,value,envelope,ratio,fitted_C";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Domain(format!("unknown report format {s:?} (csv|json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub alpha: f64,
    pub d: f64,
    pub value: f64,
    pub envelope: f64,
    pub ratio: f64,
    #[serde(rename = "fitted_C", default, skip_serializing_if = "Option::is_none")]
    pub fitted_c: Option<f64>,
}

impl ReportRow {
    /// Row with ratio = value / envelope.
    pub fn new(alpha: f64, d: f64, value: f64, envelope: f64) -> Self {
        ReportRow { alpha, d, value, envelope, ratio: value / envelope, fitted_c: None }
    }

    pub fn with_fitted(mut self, c: f64) -> Self {
        self.fitted_c = Some(c);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub pass: bool,
    pub rows: Vec<ReportRow>,
    #[serde(default)]
    pub summary: Map<String, Value>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { schema: SCHEMA.into(), command: command.into(), pass: true, rows: Vec::new(), summary: Map::new() }
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        let v = serde_json::to_value(value).map_err(|e| Error::Format(e.to_string()))?;
        self.summary.insert(key.into(), v);
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        self.check_nonempty()?;
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let c = r.fitted_c.map(|c| format!("{c:e}")).unwrap_or_default();
            let _ = writeln!(out, "{:e},{:e},{:e},{:e},{:e},{c}", r.alpha, r.d, r.value, r.envelope, r.ratio);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        self.check_nonempty()?;
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if r.schema != SCHEMA {
            return Err(Error::Format(format!("unsupported report schema {:?}", r.schema)));
        }
        Ok(r)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn check_nonempty(&self) -> Result<()> {
        if self.rows.is_empty() && self.summary.is_empty() {
            return Err(Error::Domain("refusing to emit an empty report".into()));
        }
        if self.rows.is_empty() {
            return Err(Error::Domain(format!("report for {:?} has no rows", self.command)));
        }
        Ok(())
    }
}

/// Writes the report to `path`.
pub fn emit_report(report: &Report, format: Format, path: &Path) -> Result<()> {
    let text = report.render(format)?;
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
