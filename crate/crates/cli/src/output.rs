//! Table rendering. CSV uses 17-significant-digit scientific notation with
//! LF line endings and echoes the configuration on a leading comment line;
//! JSON nests the same configuration beside the row array. No non-finite
//! number is ever written.

use crate::config::OutputFormat;
use crate::RunError;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(&'static str),
}

pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn check_finite(&self) -> Result<(), RunError> {
        for (index, row) in self.rows.iter().enumerate() {
            assert_eq!(row.len(), self.headers.len(), "row width drifted from header");
            for (cell, header) in row.iter().zip(&self.headers) {
                if let Cell::Float(value) = cell {
                    if !value.is_finite() {
                        return Err(RunError::Numerical(format!(
                            "non-finite value {value} in column {header}, row {index}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn render_cell(cell: &Cell) -> String {
    match cell {
        Cell::Float(value) => format!("{value:.16e}"),
        Cell::Int(value) => value.to_string(),
        Cell::Bool(value) => value.to_string(),
        Cell::Text(value) => (*value).to_string(),
    }
}

fn cell_to_json(cell: &Cell) -> serde_json::Value {
    match cell {
        Cell::Float(value) => {
            serde_json::Value::Number(serde_json::Number::from_f64(*value).expect("checked finite"))
        }
        Cell::Int(value) => serde_json::Value::from(*value),
        Cell::Bool(value) => serde_json::Value::from(*value),
        Cell::Text(value) => serde_json::Value::from(*value),
    }
}

fn render_csv(table: &Table, config_json: &str) -> String {
    let mut text = format!("# config {config_json}\n");
    text.push_str(&table.headers.join(","));
    text.push('\n');
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(render_cell).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    text
}

fn render_json(table: &Table, config: serde_json::Value) -> String {
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut object = serde_json::Map::new();
            for (header, cell) in table.headers.iter().zip(row) {
                object.insert((*header).to_string(), cell_to_json(cell));
            }
            serde_json::Value::Object(object)
        })
        .collect();
    let mut top = serde_json::Map::new();
    top.insert("config".into(), config);
    top.insert("rows".into(), serde_json::Value::Array(rows));
    let mut text =
        serde_json::to_string_pretty(&serde_json::Value::Object(top)).expect("plain json tree");
    text.push('\n');
    text
}

/// Validates and writes the table; nothing is created on failure.
pub fn emit<C: Serialize>(
    table: &Table,
    config: &C,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<(), RunError> {
    table.check_finite()?;
    let text = match format {
        OutputFormat::Csv => {
            let config_json = serde_json::to_string(config).expect("config serializes");
            render_csv(table, &config_json)
        }
        OutputFormat::Json => {
            let config_value = serde_json::to_value(config).expect("config serializes");
            render_json(table, config_value)
        }
    };
    match out {
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| RunError::Config(format!("cannot write to stdout: {e}"))),
        Some(path) => std::fs::write(path, text)
            .map_err(|e| RunError::Config(format!("cannot write {}: {e}", path.display()))),
    }
}
