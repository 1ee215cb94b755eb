//! Flat tables and their CSV/JSON serializations.
//!
//! Numbers are written with 17 significant digits so that every value
//! round-trips exactly; infinities are written as `+inf` / `-inf`.

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub fn format_number(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Inverse of [`format_number`].
pub fn parse_number(text: &str) -> Option<f64> {
    match text {
        "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        other => other.parse().ok(),
    }
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => format_number(*v),
        Cell::Text(s) => s.clone(),
    }
}

pub fn to_csv(table: &Table) -> String {
    let mut out = table.headers.join(",");
    out.push('\n');
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(cell_text).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Num(v) => match Number::from_f64(*v) {
            Some(n) => Value::Number(n),
            None => Value::String(format_number(*v)),
        },
        Cell::Text(s) => Value::String(s.clone()),
    }
}

/// Array of row objects keyed by the column headers, in column order.
pub fn to_json(table: &Table) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (key, cell) in table.headers.iter().zip(row) {
                obj.insert((*key).to_string(), cell_json(cell));
            }
            Value::Object(obj)
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&Value::Array(rows)).expect("table serializes");
    text.push('\n');
    text
}

/// Header and rows of a CSV document produced by [`to_csv`].
pub fn parse_csv(text: &str) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = text.lines();
    let headers = lines.next()?.split(',').map(str::to_string).collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    Some((headers, rows))
}
