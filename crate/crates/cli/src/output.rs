//! Tabular reports and their CSV / JSON encodings.
//!
//! CSV layout:
//!
//! ```text
//! # command=sweep
//! # kind=photon
//! # seed=42
//! # ...
//! # check:mc_within_5se[0]=pass; |z| = 0.31
//! theta,analytic,monte_carlo,std_error,classical_factorized
//! 0,1,1,0,0.5
//! ```
//!
//! JSON carries the same content as `{metadata, checks, columns, rows}` with
//! each row an object keyed by column name. Numbers are written in shortest
//! round-trip form, so parsing an emitted document and emitting it again
//! reproduces the same bytes.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => bail!("unknown format `{s}` (expected csv or json)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    UInt(u64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// An angle rounded to 15 significant digits.
    pub fn angle(theta: f64) -> Cell {
        Cell::Num(round_sig15(theta))
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn parse_csv(s: &str) -> Cell {
        if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
            if let Ok(v) = s.parse() {
                return Cell::UInt(v);
            }
        }
        match s {
            "true" => return Cell::Bool(true),
            "false" => return Cell::Bool(false),
            _ => {}
        }
        let looks_numeric = s.bytes().next().is_some_and(|b| b.is_ascii_digit() || b == b'-');
        if looks_numeric {
            if let Ok(v) = s.parse::<f64>() {
                return Cell::Num(v);
            }
        }
        Cell::Text(s.to_string())
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::UInt(v) => Value::Number((*v).into()),
            Cell::Num(v) => Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }

    fn from_json(v: &Value) -> Result<Cell> {
        Ok(match v {
            Value::Number(n) => match n.as_u64() {
                Some(u) if !n.to_string().contains(['.', 'e', 'E']) => Cell::UInt(u),
                _ => Cell::Num(n.as_f64().ok_or_else(|| anyhow!("non-finite number"))?),
            },
            Value::Bool(b) => Cell::Bool(*b),
            Value::String(s) => Cell::Text(s.clone()),
            other => bail!("unsupported JSON cell {other}"),
        })
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::UInt(v) => Some(*v as f64),
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::UInt(v) => write!(f, "{v}"),
            Cell::Num(v) if *v != 0.0 && (v.abs() < 1e-5 || v.abs() >= 1e16) => write!(f, "{v:e}"),
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Rounds to 15 significant digits, the precision at which decimal text round-trips through f64.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub metadata: Vec<(String, Cell)>,
    pub checks: Vec<Check>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.metadata.push((key.to_string(), value.into()));
        self
    }

    pub fn get_meta(&self, key: &str) -> Option<&Cell> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }

    pub fn emit(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn parse(text: &str, format: Format) -> Result<Self> {
        match format {
            Format::Csv => Self::from_csv(text),
            Format::Json => Self::from_json(text),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = Vec::new();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}")?;
        }
        for c in &self.checks {
            let verdict = if c.passed { "pass" } else { "fail" };
            writeln!(out, "# check:{}={verdict}; {}", c.name, c.detail)?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row.iter().map(|c| c.to_string()))?;
            }
            w.flush()?;
        }
        Ok(String::from_utf8(out)?)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut report = Report::default();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix("# ") else { break };
            body_start += line.len();
            let rest = rest.trim_end_matches(['\n', '\r']);
            let (key, value) = rest.split_once('=').ok_or_else(|| anyhow!("malformed header line `{rest}`"))?;
            if let Some(name) = key.strip_prefix("check:") {
                let (verdict, detail) = value.split_once("; ").unwrap_or((value, ""));
                let passed = match verdict {
                    "pass" => true,
                    "fail" => false,
                    _ => bail!("bad check verdict `{verdict}`"),
                };
                report.checks.push(Check::new(name, passed, detail));
            } else {
                report.metadata.push((key.to_string(), Cell::parse_csv(value)));
            }
        }
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(&text.as_bytes()[body_start..]);
        report.columns = reader.headers()?.iter().map(str::to_string).collect();
        for record in reader.records() {
            let record = record.context("reading CSV row")?;
            report.rows.push(record.iter().map(Cell::parse_csv).collect());
        }
        Ok(report)
    }

    pub fn to_json(&self) -> Result<String> {
        let metadata: Map<String, Value> = self.metadata.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| serde_json::json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::to_json)).collect()))
            .collect();
        let doc = serde_json::json!({
            "metadata": metadata,
            "checks": checks,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)?;
        let mut report = Report::default();
        for (k, v) in doc["metadata"].as_object().ok_or_else(|| anyhow!("missing metadata object"))? {
            report.metadata.push((k.clone(), Cell::from_json(v)?));
        }
        for c in doc["checks"].as_array().ok_or_else(|| anyhow!("missing checks array"))? {
            report.checks.push(Check::new(
                c["name"].as_str().unwrap_or_default(),
                c["passed"].as_bool().ok_or_else(|| anyhow!("check without verdict"))?,
                c["detail"].as_str().unwrap_or_default(),
            ));
        }
        report.columns = doc["columns"]
            .as_array()
            .ok_or_else(|| anyhow!("missing columns array"))?
            .iter()
            .map(|c| c.as_str().map(str::to_string).ok_or_else(|| anyhow!("column name is not a string")))
            .collect::<Result<_>>()?;
        for r in doc["rows"].as_array().ok_or_else(|| anyhow!("missing rows array"))? {
            let row = report
                .columns
                .iter()
                .map(|c| Cell::from_json(r.get(c).ok_or_else(|| anyhow!("row missing `{c}`"))?))
                .collect::<Result<_>>()?;
            report.rows.push(row);
        }
        Ok(report)
    }

    /// Aligned plain-text rendering with a check summary.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("{k}: {v}\n"));
        }
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match c {
                        Cell::Num(v) => format!("{v:.6}"),
                        other => other.to_string(),
                    })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, h)| cells.iter().map(|r| r[i].len()).chain([h.len()]).max().unwrap_or(0))
            .collect();
        let line = |items: Vec<&str>| {
            items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect::<Vec<_>>().join("  ")
        };
        out.push_str(&line(self.columns.iter().map(String::as_str).collect()));
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r.iter().map(String::as_str).collect()));
            out.push('\n');
        }
        for c in &self.checks {
            out.push_str(&format!("[{}] {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        out
    }
}
