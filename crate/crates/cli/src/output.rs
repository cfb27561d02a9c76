//! Table rendering. Numbers are rounded to 12 significant digits and printed
//! in their shortest round-trip form, so output never depends on locale or
//! on noise in the last few bits.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
}

fn round_sig12(x: f64) -> f64 {
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn non_finite(x: f64) -> &'static str {
    if x.is_nan() {
        "nan"
    } else if x > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

/// Text of a number as it appears in CSV and JSON output.
pub fn format_number(x: f64) -> String {
    match Number::from_f64(round_sig12(x)) {
        Some(n) if x.is_finite() => n.to_string(),
        _ => non_finite(x).to_string(),
    }
}

impl Cell {
    fn text(&self) -> String {
        match *self {
            Cell::Num(x) => format_number(x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match *self {
            Cell::Num(x) if x.is_finite() => Number::from_f64(round_sig12(x))
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(non_finite(x).into())),
            Cell::Num(x) => Value::String(non_finite(x).into()),
            Cell::Int(n) => Value::from(n),
            Cell::Bool(b) => Value::Bool(b),
        }
    }
}

/// Rows with a fixed column order. A `single` table is a report and renders
/// as one JSON object instead of an array.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub single: bool,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            single: false,
        }
    }

    pub fn report(columns: Vec<&'static str>, row: Vec<Cell>) -> Self {
        let mut t = Self::new(columns);
        t.push(row);
        t.single = true;
        t
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::text).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn object(&self, row: &[Cell]) -> Value {
        let map: Map<String, Value> = self
            .columns
            .iter()
            .zip(row)
            .map(|(k, v)| (k.to_string(), v.json()))
            .collect();
        Value::Object(map)
    }

    fn json(&self) -> String {
        let value = if self.single && self.rows.len() == 1 {
            self.object(&self.rows[0])
        } else {
            Value::Array(self.rows.iter().map(|r| self.object(r)).collect())
        };
        let mut out = serde_json::to_string_pretty(&value).expect("json values serialize");
        out.push('\n');
        out
    }
}
