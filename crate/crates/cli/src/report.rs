use std::fmt;

use serde::{Deserialize, Serialize};
use werner_core::Warning;

/// Significant digits kept for every float in a report.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// A table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Text(String),
}

impl Value {
    /// Rounds to [`SIGNIFICANT_DIGITS`]; non-finite values become text.
    pub fn num(x: f64) -> Value {
        if x.is_finite() {
            Value::Num(round_significant(x))
        } else if x.is_nan() {
            Value::Text("NaN".into())
        } else if x > 0.0 {
            Value::Text("inf".into())
        } else {
            Value::Text("-inf".into())
        }
    }

    pub fn opt_num(x: Option<f64>) -> Value {
        x.map_or(Value::Null, Value::num)
    }

    pub fn int(n: impl TryInto<i64>) -> Value {
        n.try_into().map_or(Value::Null, Value::Int)
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }
}

pub fn round_significant(x: f64) -> f64 {
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Num(x) => write!(f, "{x}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub key: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Section {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Section { title: title.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    /// Two-column quantity/value section.
    pub fn key_value(title: impl Into<String>) -> Self {
        Section::new(title, &["quantity", "value"])
    }

    pub fn row(&mut self, row: Vec<Value>) -> &mut Self {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
        self
    }

    pub fn entry(&mut self, key: &str, value: Value) -> &mut Self {
        self.row(vec![Value::text(key), value])
    }

    /// Looks up `key` in a key/value section.
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.rows.iter().find(|r| matches!(&r[0], Value::Text(k) if k == key)).map(|r| &r[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    /// Seconds since the Unix epoch; only set on request.
    pub timestamp: Option<u64>,
    pub inputs: Vec<Field>,
    pub sections: Vec<Section>,
    pub warnings: Vec<Warning>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: None,
            timestamp: None,
            inputs: Vec::new(),
            sections: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: Value) -> &mut Self {
        self.inputs.push(Field { key: key.into(), value });
        self
    }

    pub fn section(&self, title: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.title == title)
    }

    pub fn warn(&mut self, warning: Warning) {
        if !self.warnings.contains(&warning) {
            self.warnings.push(warning);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("# werner {}\n\n", self.command);
        out += &format!("- version: {}\n", self.version);
        if let Some(seed) = self.seed {
            out += &format!("- seed: {seed}\n");
        }
        if let Some(ts) = self.timestamp {
            out += &format!("- timestamp: {ts}\n");
        }
        for f in &self.inputs {
            out += &format!("- {}: {}\n", f.key, f.value);
        }
        for s in &self.sections {
            out += &format!("\n## {}\n\n", s.title);
            out += &format!("| {} |\n", s.columns.join(" | "));
            out += &format!("|{}\n", "---|".repeat(s.columns.len()));
            for r in &s.rows {
                let cells: Vec<String> = r.iter().map(|v| v.to_string().replace('|', "\\|")).collect();
                out += &format!("| {} |\n", cells.join(" | "));
            }
        }
        if !self.warnings.is_empty() {
            out += "\n## warnings\n\n";
            for w in &self.warnings {
                out += &format!("- **{}**: {}\n", w.name, w.message);
            }
        }
        out
    }

    /// One CSV block per section, each preceded by a `# title` line.
    pub fn to_csv(&self) -> csv::Result<String> {
        let mut blocks = Vec::new();
        let mut meta = vec![("command".to_string(), self.command.clone()), ("version".into(), self.version.clone())];
        meta.extend(self.seed.map(|s| ("seed".into(), s.to_string())));
        meta.extend(self.timestamp.map(|t| ("timestamp".into(), t.to_string())));
        meta.extend(self.inputs.iter().map(|f| (f.key.clone(), f.value.to_string())));
        blocks.push(csv_block("metadata", &["key", "value"], meta.iter().map(|(k, v)| vec![k.clone(), v.clone()]))?);
        for s in &self.sections {
            let cols: Vec<&str> = s.columns.iter().map(String::as_str).collect();
            blocks.push(csv_block(&s.title, &cols, s.rows.iter().map(|r| r.iter().map(Value::to_string).collect()))?);
        }
        if !self.warnings.is_empty() {
            let rows = self.warnings.iter().map(|w| vec![w.name.clone(), w.message.clone()]);
            blocks.push(csv_block("warnings", &["name", "message"], rows)?);
        }
        Ok(blocks.join("\n"))
    }
}

fn csv_block(title: &str, columns: &[&str], rows: impl Iterator<Item = Vec<String>>) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8");
    Ok(format!("# {title}\n{body}"))
}
