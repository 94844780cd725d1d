//! Distribution files.
//!
//! JSON: `{"support": [...], "p": [...], "q": [...]}`.
//! CSV: header `outcome,p,q`, one row per outcome.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::spectrum::{validate_pair, DiscretePair};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonPair {
    support: Vec<String>,
    p: Vec<f64>,
    q: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    outcome: String,
    p: f64,
    q: f64,
}

/// Input encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Json,
    Csv,
}

impl InputFormat {
    /// From the file extension, JSON unless it ends in `.csv`.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Csv,
            _ => InputFormat::Json,
        }
    }
}

/// Parses a JSON distribution document.
pub fn parse_json(text: &str) -> Result<DiscretePair> {
    let doc: JsonPair = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    validate_pair(doc.support, doc.p, doc.q)
}

/// Parses a CSV distribution document with header `outcome,p,q`.
pub fn parse_csv(text: &str) -> Result<DiscretePair> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("line 1: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["outcome", "p", "q"] {
        return Err(Error::Parse(format!(
            "line 1: expected header `outcome,p,q`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut support = Vec::new();
    let mut p = Vec::new();
    let mut q = Vec::new();
    for row in reader.deserialize::<CsvRow>() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |pos| pos.line());
            Error::Parse(format!("line {line}: {e}"))
        })?;
        support.push(row.outcome);
        p.push(row.p);
        q.push(row.q);
    }
    validate_pair(support, p, q)
}

/// Reads a distribution file, choosing the parser by extension.
pub fn read_pair(path: &Path) -> Result<DiscretePair> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let parsed = match InputFormat::from_path(path) {
        InputFormat::Json => parse_json(&text),
        InputFormat::Csv => parse_csv(&text),
    };
    parsed.map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}
