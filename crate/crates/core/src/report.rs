//! Reports. JSON is canonical; the text form is rendered from it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::spec::RunSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    /// An expected mathematical outcome, such as a non-rc certificate.
    Finding,
    /// An internal invariant failed. Any of these makes the run fail.
    Violation,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Finding => "finding",
            Status::Violation => "VIOLATION",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub id: String,
    pub status: Status,
    pub summary: String,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub data: serde_json::Value,
}

impl Section {
    pub fn new(id: impl Into<String>, status: Status, summary: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            status,
            summary: summary.into(),
            data: serde_json::Value::Null,
        }
    }

    pub fn with<T: Serialize>(mut self, data: &T) -> Result<Self> {
        self.data = serde_json::to_value(data).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub id: String,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub spec: RunSpec,
    pub seed: u64,
    pub budget: usize,
    pub sections: Vec<Section>,
    /// Only present when asked for; reports without it are reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl Report {
    pub fn new(spec: &RunSpec) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            spec: spec.clone(),
            seed: spec.seed,
            budget: spec.effective_budget(),
            sections: Vec::new(),
            timings: None,
        }
    }

    pub fn violations(&self) -> Vec<&Section> {
        self.sections
            .iter()
            .filter(|s| s.status == Status::Violation)
            .collect()
    }

    pub fn ok(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok() {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::Usage(format!(
                "unknown format {s:?}, expected json or text"
            ))),
        }
    }
}

pub fn to_json(r: &Report) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("reports serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<Report> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_text(r: &Report) -> String {
    let mut out = String::new();
    let kind = r.spec.kind.name();
    let _ = writeln!(
        out,
        "{} {}: {kind}, seed {}, budget {}",
        r.tool, r.version, r.seed, r.budget
    );
    for s in &r.sections {
        let _ = writeln!(out, "  [{}] {}: {}", s.status.label(), s.id, s.summary);
    }
    if let Some(t) = &r.timings {
        for t in t {
            let _ = writeln!(out, "  time {}: {} ms", t.id, t.millis);
        }
    }
    let v = r.violations().len();
    let f = r
        .sections
        .iter()
        .filter(|s| s.status == Status::Finding)
        .count();
    let _ = writeln!(
        out,
        "{} sections, {f} findings, {v} violations",
        r.sections.len()
    );
    out
}

pub fn render(r: &Report, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Text => to_text(r),
    }
}
