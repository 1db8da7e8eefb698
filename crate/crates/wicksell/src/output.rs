//! Output headers and writers.
//!
//! CSV files start with `#` comment lines naming the tool version, the
//! resolved configuration and the seed. JSON documents carry the same
//! information in a leading `header` object.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: Value,
}

impl RunHeader {
    pub fn new(command: &str, seed: u64, config: Value) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command: command.to_string(),
            seed,
            config,
        }
    }

    pub fn comment_lines(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} {}", self.tool, self.version);
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# config: {}", self.config);
        let _ = writeln!(out, "# seed: {}", self.seed);
        out
    }
}

/// A JSON payload preceded by its run header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub header: RunHeader,
    #[serde(flatten)]
    pub body: T,
}

/// Comma separated table with a comment header.
pub struct CsvTable {
    header: RunHeader,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: RunHeader, columns: &[&str]) -> Self {
        Self {
            header,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.comment_lines();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, text)
}

pub fn write_json<T: Serialize>(path: &Path, header: RunHeader, body: &T) -> io::Result<()> {
    let doc = Document { header, body };
    let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
    text.push('\n');
    write_text(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_starts_with_header() {
        let header = RunHeader::new("estimate", 7, json!({"grid": "0:1:2"}));
        let mut table = CsvTable::new(header, &["x", "y"]);
        table.push(vec![0.0, 0.1]);
        table.push(vec![0.5, 1.0 / 3.0]);
        let text = table.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# wicksell {VERSION}"));
        assert_eq!(lines[2], r#"# config: {"grid":"0:1:2"}"#);
        assert_eq!(lines[3], "# seed: 7");
        assert_eq!(lines[4], "x,y");
        assert_eq!(lines[6].split(',').nth(1).unwrap().parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn document_header_comes_first() {
        #[derive(Serialize, Deserialize, PartialEq, Debug)]
        struct Body {
            value: f64,
        }
        let doc = Document {
            header: RunHeader::new("experiment", 3, json!({})),
            body: Body { value: 2.5 },
        };
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.starts_with(r#"{"header":"#));
        let back: Document<Body> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
    }
}
