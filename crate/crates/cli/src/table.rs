//! Result tables and their CSV/JSON encodings.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};

/// One cell of a result table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// A value in nats, rescaled by `--bits`.
    Nats(f64),
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn nats_opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Nats)
    }
}

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, bits: bool) -> String {
        match format {
            Format::Csv => self.to_csv(bits),
            Format::Json => self.to_json(bits),
        }
    }

    /// Header row, then one line per row; floats carry 17 significant digits.
    pub fn to_csv(&self, bits: bool) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| csv_cell(c, bits)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Array of objects keyed by column, in column order. Non-finite floats
    /// become the strings `"inf"`, `"-inf"` and `"nan"`.
    pub fn to_json(&self, bits: bool) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert((*col).to_string(), json_cell(cell, bits));
                }
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&Value::Array(rows)).expect("tables always serialize");
        out.push('\n');
        out
    }
}

fn scale(v: f64, bits: bool) -> f64 {
    if bits {
        v / std::f64::consts::LN_2
    } else {
        v
    }
}

/// `{:.16e}` for finite values, `inf`/`-inf`/`nan` otherwise.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let mut s = String::new();
        write!(s, "{v:.16e}").expect("writing to a String");
        s
    }
}

fn csv_cell(cell: &Cell, bits: bool) -> String {
    match cell {
        Cell::Nats(v) => format_float(scale(*v, bits)),
        Cell::Num(v) => format_float(*v),
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
        Cell::Text(t) => t.clone(),
        Cell::Empty => String::new(),
    }
}

fn json_float(v: f64) -> Value {
    Number::from_f64(v).map_or_else(|| Value::String(format_float(v)), Value::Number)
}

fn json_cell(cell: &Cell, bits: bool) -> Value {
    match cell {
        Cell::Nats(v) => json_float(scale(*v, bits)),
        Cell::Num(v) => json_float(*v),
        Cell::Int(i) => Value::from(*i),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Text(t) => Value::String(t.clone()),
        Cell::Empty => Value::Null,
    }
}
