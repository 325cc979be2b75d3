use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;
use crate::CliError;

/// Provenance attached to every artifact.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Map<String, Value>) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            tool_version: concat!("stepharm ", env!("CARGO_PKG_VERSION")).to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
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

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_sig(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            // round through the CSV text so both formats carry the same digits
            Cell::Real(v) => format_sig(*v)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// A result table with named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn to_json(&self, manifest: &RunManifest) -> String {
        let mut doc = Map::new();
        doc.insert("manifest".into(), serde_json::to_value(manifest).expect("manifest serializes"));
        doc.insert("data".into(), self.to_json_rows());
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("table serializes");
        text.push('\n');
        text
    }
}

/// 12 significant digits, `%g` style: fixed notation for exponents in
/// [-4, 12), scientific otherwise, trailing zeros removed.
pub fn format_sig(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// Writes `table` to `dest` (or stdout) in `format`. CSV destined for a file
/// gets the manifest as a JSON sidecar; CSV on stdout reports it on stderr.
pub fn emit(table: &Table, manifest: &RunManifest, format: Format, dest: Option<&Path>) -> Result<(), CliError> {
    let body = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(manifest),
    };
    match dest {
        Some(path) => {
            fs::write(path, body).map_err(|e| io_err(path, e))?;
            if format == Format::Csv {
                let side = sidecar(path, ".manifest.json");
                let text = serde_json::to_string_pretty(manifest).expect("manifest serializes") + "\n";
                fs::write(&side, text).map_err(|e| io_err(&side, e))?;
            }
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
            if format == Format::Csv {
                eprintln!("manifest: {}", serde_json::to_string(manifest).expect("manifest serializes"));
            }
        }
    }
    Ok(())
}
