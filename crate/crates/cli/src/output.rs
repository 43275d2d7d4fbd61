//! Table document rendering and atomic file output.
//!
//! Every subcommand produces one [`Document`]: metadata (version, resolved
//! config echo, seed, convention notes), an optional structured summary, and
//! a numeric table. CSV output carries the metadata as a single
//! `#`-prefixed JSON header line; JSON output mirrors the same schema. All
//! rendering is deterministic, and files are written via a temporary file
//! plus atomic rename so failed runs never leave partial output behind.

use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct Document {
    pub meta: serde_json::Value,
    pub summary: Option<serde_json::Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Document {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn header_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        obj.insert("meta".into(), self.meta.clone());
        if let Some(summary) = &self.summary {
            obj.insert("summary".into(), summary.clone());
        }
        serde_json::Value::Object(obj)
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# ");
        out.push_str(&self.header_json().to_string());
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let mut obj = match self.header_json() {
            serde_json::Value::Object(o) => o,
            _ => unreachable!(),
        };
        obj.insert(
            "columns".into(),
            serde_json::json!(self.columns),
        );
        obj.insert("rows".into(), serde_json::json!(self.rows));
        let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(obj))
            .expect("document serialization cannot fail");
        s.push('\n');
        s
    }
}

/// Resolves a requested output path against `LEVYLAB_OUTPUT_DIR` for
/// relative paths.
pub fn resolve_path(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var("LEVYLAB_OUTPUT_DIR") {
            if !dir.is_empty() {
                return PathBuf::from(dir).join(path);
            }
        }
    }
    path.to_path_buf()
}

/// Writes rendered output to stdout or atomically to a file.
pub fn emit(rendered: &str, output: Option<&Path>) -> std::io::Result<()> {
    match output {
        None => {
            std::io::stdout().write_all(rendered.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let path = resolve_path(path);
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
            let mut tmp = match dir {
                Some(d) => tempfile::NamedTempFile::new_in(d)?,
                None => tempfile::NamedTempFile::new_in(".")?,
            };
            tmp.write_all(rendered.as_bytes())?;
            tmp.flush()?;
            tmp.persist(&path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}
