//! Tabular reports rendered as CSV or JSON.

use serde_json::{json, Map, Number};

use crate::cli::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i128)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(i128::from(v))
    }
}

impl From<i128> for Value {
    fn from(v: i128) -> Self {
        Value::Int(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Empty, Into::into)
    }
}

/// Rounds to 12 significant digits so that reports do not expose the last
/// bits of floating-point sums.
pub fn round_sig(v: f64) -> f64 {
    if v.is_finite() {
        format!("{v:.11e}").parse().expect("formatted float parses")
    } else {
        v
    }
}

impl Value {
    fn csv_field(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Float(v) => round_sig(*v).to_string(),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Int(v) => i64::try_from(*v)
                .map(|i| json!(i))
                .unwrap_or_else(|_| json!(v.to_string())),
            Value::Float(v) => Number::from_f64(round_sig(*v)).map_or(serde_json::Value::Null, Into::into),
            Value::Text(s) => json!(s),
            Value::Bool(b) => json!(b),
            Value::Empty => serde_json::Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    /// A one-line verdict printed ahead of the table.
    pub status: Option<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// `key=value` remarks; CSV comment lines before the metadata line.
    pub notes: Vec<(String, Value)>,
}

impl Report {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            status: None,
            columns: columns.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.command);
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.notes.push((key.to_owned(), value.into()));
    }

    /// The table body; the status line is printed separately.
    pub fn render(&self, format: Format, seed: u64) -> String {
        match format {
            Format::Csv => self.render_csv(seed),
            Format::Json => self.render_json(seed),
        }
    }

    fn render_csv(&self, seed: u64) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            writer
                .write_record(row.iter().map(Value::csv_field))
                .expect("in-memory write");
        }
        let mut out = String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields");
        for (key, value) in &self.notes {
            out.push_str(&format!("# {key}={}\n", value.csv_field()));
        }
        out.push_str(&format!("# seed={seed} version={}\n", env!("CARGO_PKG_VERSION")));
        out
    }

    fn render_json(&self, seed: u64) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| ((*c).to_owned(), v.json()))
                    .collect();
                obj.into()
            })
            .collect();
        let notes: Map<String, serde_json::Value> = self.notes.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let mut doc = Map::new();
        doc.insert("command".into(), json!(self.command));
        doc.insert("seed".into(), json!(seed));
        doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        if let Some(status) = &self.status {
            doc.insert("status".into(), json!(status));
        }
        doc.insert("rows".into(), rows.into());
        if !notes.is_empty() {
            doc.insert("notes".into(), notes.into());
        }
        let mut out = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("serializable");
        out.push('\n');
        out
    }
}
