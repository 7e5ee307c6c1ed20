//! Plain tabular output: CSV with `# key: value` metadata lines and JSON
//! arrays of row objects. Floats are written with 12 significant digits.

use serde_json::{Map, Value};

/// 12 significant digits, scientific. Negative zero prints as zero.
#[must_use]
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Table {
    #[must_use]
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row; panics if the width does not match the header.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    #[must_use]
    pub fn to_csv(&self, metadata: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in metadata {
            // metadata values are single-line by construction
            out.push_str(&format!("# {k}: {}\n", v.replace('\n', " ")));
        }
        let line = |r: &[String]| r.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",");
        out.push_str(&line(&self.columns));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }

    /// Rows as JSON objects. Cells that parse as numbers become numbers.
    #[must_use]
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let mut m = Map::new();
                    for (c, v) in self.columns.iter().zip(r) {
                        let cell = match v.parse::<f64>() {
                            Ok(x) if x.is_finite() => serde_json::Number::from_f64(x)
                                .map_or_else(|| Value::String(v.clone()), Value::Number),
                            _ => Value::String(v.clone()),
                        };
                        m.insert(c.clone(), cell);
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }

    /// Fixed-width text rendering.
    #[must_use]
    pub fn to_text(&self) -> String {
        let mut width: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for r in &self.rows {
            for (w, f) in width.iter_mut().zip(r) {
                *w = (*w).max(f.chars().count());
            }
        }
        let line = |r: &[String]| {
            r.iter()
                .zip(&width)
                .map(|(f, w)| format!("{f:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = line(&self.columns);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}
