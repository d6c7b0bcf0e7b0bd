//! Result tables and their CSV / JSON emission.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::value::RawValue;

use crate::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Num(f64),
    Text(String),
    Missing,
}

impl Value {
    /// Text form shared by both formats; floats carry 17 significant digits.
    pub fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Num(x) => format_float(*x),
            Value::Text(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Num(x) => Some(*x),
            _ => None,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Missing, Value::Num)
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }

    /// Rejects NaN and infinities before anything is written.
    pub fn check_finite(&self) -> CliResult<()> {
        for (i, row) in self.rows.iter().enumerate() {
            for (c, v) in self.columns.iter().zip(row) {
                if let Value::Num(x) = v {
                    if !x.is_finite() {
                        return Err(CliError::Numerical(format!("row {i}, column `{c}` is {x}")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::validation("format", format!("unknown format `{other}`"))),
        }
    }
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

struct JsonRow<'a> {
    columns: &'a [&'static str],
    values: &'a [Value],
}

impl Serialize for JsonRow<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.columns.len()))?;
        for (c, v) in self.columns.iter().zip(self.values) {
            match v {
                Value::Int(i) => map.serialize_entry(c, i)?,
                Value::Num(x) => {
                    let raw = RawValue::from_string(format_float(*x)).map_err(serde::ser::Error::custom)?;
                    map.serialize_entry(c, &raw)?
                }
                Value::Text(s) => map.serialize_entry(c, s)?,
                Value::Missing => map.serialize_entry(c, &())?,
            }
        }
        map.end()
    }
}

/// Serializes `table` to bytes.
pub fn render(table: &Table, format: Format) -> CliResult<Vec<u8>> {
    if table.rows.is_empty() {
        return Err(CliError::NoResults);
    }
    table.check_finite()?;
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let fail = |e: csv::Error| CliError::Numerical(format!("csv encoding: {e}"));
            w.write_record(&table.columns).map_err(fail)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Value::render)).map_err(fail)?;
            }
            w.into_inner().map_err(|e| CliError::Numerical(format!("csv encoding: {e}")))
        }
        Format::Json => {
            let rows: Vec<JsonRow> = table
                .rows
                .iter()
                .map(|values| JsonRow {
                    columns: &table.columns,
                    values,
                })
                .collect();
            let mut out =
                serde_json::to_vec_pretty(&rows).map_err(|e| CliError::Numerical(format!("json encoding: {e}")))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Writes `table` to `path` atomically: a sibling temporary file is renamed
/// into place only after everything has been serialized and flushed.
pub fn emit(table: &Table, format: Format, path: &Path) -> CliResult<()> {
    let bytes = render(table, format)?;
    write_atomic(path, &bytes)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    let mut file = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    file.write_all(bytes).map_err(|e| CliError::io(&tmp, e))?;
    file.sync_all().map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Reads a CSV table written by [`emit`]; every cell comes back as text.
pub fn read_csv(path: &Path) -> CliResult<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::validation("input", format!("{other:?}")),
    })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::validation("input", e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::validation("input", e.to_string()))?;
        rows.push(rec.iter().map(str::to_owned).collect());
    }
    Ok((header, rows))
}
