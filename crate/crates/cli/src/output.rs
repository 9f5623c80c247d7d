//! The record every command emits, and its CSV and JSON encodings.
//!
//! CSV layout: `# key=value` metadata lines, then for each table a
//! `# table=NAME` line, a `# types=...` line, a header row and the data rows,
//! then `# footer.key=value` lines. Lines end in `\n`. Floats are written with
//! Rust's shortest round-trip formatting so both encodings parse back to the
//! same record.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("malformed record: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn kind(&self) -> &'static str {
        match self {
            Cell::Int(_) => "int",
            Cell::Float(_) => "float",
            Cell::Text(_) => "text",
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn parse(kind: &str, field: &str) -> Result<Cell, OutputError> {
        let bad = || OutputError::Malformed(format!("cannot read {field:?} as {kind}"));
        match kind {
            "int" => field.parse().map(Cell::Int).map_err(|_| bad()),
            "float" => field.parse().map(Cell::Float).map_err(|_| bad()),
            "text" => Ok(Cell::Text(field.to_string())),
            _ => Err(OutputError::Malformed(format!("unknown column type {kind:?}"))),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Column types, taken from the first row. Every row must agree.
    fn kinds(&self) -> Result<Vec<&'static str>, OutputError> {
        let Some(first) = self.rows.first() else {
            return Ok(vec!["text"; self.columns.len()]);
        };
        let kinds: Vec<_> = first.iter().map(Cell::kind).collect();
        for row in &self.rows {
            if row.iter().map(Cell::kind).ne(kinds.iter().copied()) {
                return Err(OutputError::Malformed(format!("mixed column types in table {}", self.name)));
            }
        }
        Ok(kinds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: String,
    /// Canonical form of the invocation, without output options.
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    /// Scalar results reported ahead of the tables.
    pub header: BTreeMap<String, String>,
    pub tables: Vec<Table>,
    /// Consistency checks and summary statistics.
    pub footer: BTreeMap<String, String>,
}

impl OutputRecord {
    pub fn new(command: String) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION.to_string(),
            command,
            parameters: BTreeMap::new(),
            header: BTreeMap::new(),
            tables: Vec::new(),
            footer: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn encode(&self, format: Format) -> Result<String, OutputError> {
        match format {
            Format::Csv => to_csv(self),
            Format::Json => to_json(self),
        }
    }

    pub fn decode(format: Format, text: &str) -> Result<Self, OutputError> {
        match format {
            Format::Csv => from_csv(text),
            Format::Json => from_json(text),
        }
    }
}

fn meta_line(out: &mut String, key: &str, value: &str) -> Result<(), OutputError> {
    if key.contains(['=', '\n']) || value.contains('\n') {
        return Err(OutputError::Malformed(format!("metadata {key:?} cannot be written on one line")));
    }
    out.push_str("# ");
    out.push_str(key);
    out.push('=');
    out.push_str(value);
    out.push('\n');
    Ok(())
}

pub fn to_csv(record: &OutputRecord) -> Result<String, OutputError> {
    let mut out = String::new();
    meta_line(&mut out, "schema_version", &record.schema_version)?;
    meta_line(&mut out, "command", &record.command)?;
    for (k, v) in &record.parameters {
        meta_line(&mut out, &format!("parameter.{k}"), v)?;
    }
    for (k, v) in &record.header {
        meta_line(&mut out, &format!("header.{k}"), v)?;
    }
    for table in &record.tables {
        meta_line(&mut out, "table", &table.name)?;
        meta_line(&mut out, "types", &table.kinds()?.join(","))?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&table.columns)?;
        for row in &table.rows {
            if row.iter().any(|c| matches!(c, Cell::Text(s) if s.contains(['\n', '\r']))) {
                return Err(OutputError::Malformed("line break inside a text cell".into()));
            }
            w.write_record(row.iter().map(Cell::render))?;
        }
        let body = w.into_inner().map_err(|e| e.into_error())?;
        out.push_str(&String::from_utf8(body).expect("csv writer emits utf-8"));
    }
    for (k, v) in &record.footer {
        meta_line(&mut out, &format!("footer.{k}"), v)?;
    }
    Ok(out)
}

struct PendingTable {
    name: String,
    kinds: Option<Vec<String>>,
    body: String,
}

impl PendingTable {
    fn finish(self) -> Result<Table, OutputError> {
        let kinds = self
            .kinds
            .ok_or_else(|| OutputError::Malformed(format!("table {} has no types line", self.name)))?;
        let mut r = csv::ReaderBuilder::new().from_reader(self.body.as_bytes());
        let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if columns.len() != kinds.len() {
            return Err(OutputError::Malformed(format!("table {} types/header width mismatch", self.name)));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .zip(&kinds)
                .map(|(field, kind)| Cell::parse(kind, field))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Table {
            name: self.name,
            columns,
            rows,
        })
    }
}

pub fn from_csv(text: &str) -> Result<OutputRecord, OutputError> {
    let mut record = OutputRecord::new(String::new());
    record.schema_version.clear();
    let mut current: Option<PendingTable> = None;
    for line in text.lines() {
        let Some(meta) = line.strip_prefix("# ") else {
            let t = current
                .as_mut()
                .ok_or_else(|| OutputError::Malformed("data row before any table".into()))?;
            t.body.push_str(line);
            t.body.push('\n');
            continue;
        };
        let (key, value) = meta
            .split_once('=')
            .ok_or_else(|| OutputError::Malformed(format!("metadata line without '=': {line:?}")))?;
        let value = value.to_string();
        match key {
            "schema_version" => record.schema_version = value,
            "command" => record.command = value,
            "table" => {
                if let Some(t) = current.take() {
                    record.tables.push(t.finish()?);
                }
                current = Some(PendingTable {
                    name: value,
                    kinds: None,
                    body: String::new(),
                });
            }
            "types" => {
                let t = current
                    .as_mut()
                    .ok_or_else(|| OutputError::Malformed("types line outside a table".into()))?;
                t.kinds = Some(value.split(',').map(str::to_string).collect());
            }
            _ => {
                let (section, name) = key
                    .split_once('.')
                    .ok_or_else(|| OutputError::Malformed(format!("unknown metadata key {key:?}")))?;
                let map = match section {
                    "parameter" => &mut record.parameters,
                    "header" => &mut record.header,
                    "footer" => &mut record.footer,
                    _ => return Err(OutputError::Malformed(format!("unknown metadata key {key:?}"))),
                };
                map.insert(name.to_string(), value);
            }
        }
    }
    if let Some(t) = current.take() {
        record.tables.push(t.finish()?);
    }
    Ok(record)
}

pub fn to_json(record: &OutputRecord) -> Result<String, OutputError> {
    let mut s = serde_json::to_string_pretty(record)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<OutputRecord, OutputError> {
    Ok(serde_json::from_str(text)?)
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> OutputRecord {
        let mut r = OutputRecord::new("joint --n 2 --z 1".into());
        r.param("n", 2).param("z", 1);
        r.header.insert("C".into(), format!("{:?}", 0.682_689_492_137_085_9));
        let mut t = Table::new("joint", &["X", "K", "prob_exact", "prob_float"]);
        t.push(vec![(-2i64).into(), 0u32.into(), "1/2^2".into(), 0.25.into()]);
        t.push(vec![0i64.into(), 1u32.into(), "1/2^2".into(), 1.0.into()]);
        t.push(vec![2i64.into(), 1u32.into(), "a,\"quoted\"".into(), 1e-300.into()]);
        r.tables.push(t);
        r.tables.push(Table::new("empty", &["a", "b"]));
        let mut m = Table::new("moments", &["moment", "exact"]);
        m.push(vec!["E(X)".into(), "7".into()]);
        r.tables.push(m);
        r.footer.insert("total".into(), "1/2^0".into());
        r
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let text = to_csv(&r).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.contains("\nX,K,prob_exact,prob_float\n-2,0,1/2^2,0.25\n"));
        assert_eq!(from_csv(&text).unwrap(), r);
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert_eq!(from_json(&to_json(&r).unwrap()).unwrap(), r);
    }

    #[test]
    fn mixed_columns_are_rejected() {
        let mut r = OutputRecord::new("x".into());
        let mut t = Table::new("t", &["a"]);
        t.push(vec![1i64.into()]);
        t.push(vec![1.5.into()]);
        r.tables.push(t);
        assert!(matches!(to_csv(&r), Err(OutputError::Malformed(_))));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"first\n").unwrap();
        write_atomic(&path, b"second\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
