//! Command results and their serialization to CSV, JSON or text files.
//!
//! Everything is rendered in memory first; files are written to temporary
//! names and renamed only once all of them were written, so a failed run
//! leaves no artifacts behind.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use strongfield::export::Table;
use strongfield::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "txt",
        }
    }
}

pub struct Report {
    pub command: String,
    pub scenario: Scenario,
    pub warnings: Vec<String>,
    /// scalar results, in output order
    pub summary: Vec<(String, String)>,
    pub tables: Vec<(String, Table)>,
    /// replaces the generic text rendering when present
    pub text: Option<String>,
}

impl Report {
    pub fn new(command: &str, scenario: Scenario) -> Self {
        Self { command: command.to_string(), scenario, warnings: Vec::new(), summary: Vec::new(), tables: Vec::new(), text: None }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn warn(&mut self, w: impl ToString) {
        self.warnings.push(w.to_string());
    }

    pub fn table(&mut self, name: &str, t: Table) {
        self.tables.push((name.to_string(), t));
    }

    fn metadata(&self) -> Vec<(String, String)> {
        let mut m = vec![
            ("command".to_string(), self.command.clone()),
            ("scenario".to_string(), self.scenario.to_json_line()),
        ];
        m.extend(self.summary.iter().cloned());
        m.extend(self.warnings.iter().map(|w| ("warning".to_string(), w.clone())));
        m
    }

    pub fn to_json(&self) -> Value {
        let mut summary = Map::new();
        for (k, v) in &self.summary {
            summary.insert(k.clone(), cell(v));
        }
        let mut tables = Map::new();
        for (k, t) in &self.tables {
            tables.insert(k.clone(), t.to_json());
        }
        json!({
            "command": self.command,
            "scenario": serde_json::to_value(&self.scenario).unwrap_or(Value::Null),
            "warnings": self.warnings,
            "summary": summary,
            "tables": tables,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        if let Some(t) = &self.text {
            out.push_str(t);
            return out;
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("{k}: {v}\n"));
        }
        for (name, t) in &self.tables {
            out.push_str(&format!("\n[{name}]\n"));
            out.push_str(&t.to_text());
        }
        out
    }

    /// (file name, contents) for every artifact of this report.
    pub fn render(&self, format: Format) -> Vec<(String, String)> {
        let stem = self.command.replace('-', "_");
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).unwrap_or_default();
                s.push('\n');
                vec![(format!("{stem}.json"), s)]
            }
            Format::Text => vec![(format!("{stem}.txt"), self.to_text())],
            Format::Csv => {
                let meta = self.metadata();
                if self.tables.is_empty() {
                    return vec![(format!("{stem}.csv"), Table::new(&["key", "value"]).to_csv(&meta))];
                }
                self.tables
                    .iter()
                    .map(|(name, t)| (format!("{stem}_{name}.{}", format.extension()), t.to_csv(&meta)))
                    .collect()
            }
        }
    }
}

fn cell(s: &str) -> Value {
    match s {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => s.parse::<f64>().ok().and_then(|x| serde_json::Number::from_f64(x).map(Value::Number)).unwrap_or_else(|| Value::String(s.to_string())),
    }
}

/// Writes all artifacts into `dir` or nothing at all.
pub fn write_all(dir: &Path, files: &[(String, String)]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let pid = std::process::id();
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    let cleanup = |staged: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in staged {
            let _ = fs::remove_file(tmp);
        }
    };
    for (name, contents) in files {
        let tmp = dir.join(format!(".{name}.{pid}.partial"));
        if let Err(e) = fs::write(&tmp, contents) {
            let _ = fs::remove_file(&tmp);
            cleanup(&staged);
            return Err(e);
        }
        staged.push((tmp, dir.join(name)));
    }
    let mut done = Vec::new();
    for (i, (tmp, dst)) in staged.iter().enumerate() {
        if let Err(e) = fs::rename(tmp, dst) {
            cleanup(&staged[i..]);
            for d in &done {
                let _ = fs::remove_file(d);
            }
            return Err(e);
        }
        done.push(dst.clone());
    }
    Ok(done)
}
