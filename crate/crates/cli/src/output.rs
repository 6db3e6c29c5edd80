//! CSV and JSON emission with a metadata header.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const UNITS: &str = "rates are angular frequencies in kHz, times in ms, hbar = 1";

#[derive(Debug, Clone)]
pub struct Metadata {
    pub command: String,
    pub config_hash: String,
}

impl Metadata {
    /// Hashes the canonical config together with every option that can
    /// change the output.
    pub fn new(command: &str, canonical_config: &str, overrides: &[(&str, String)]) -> Self {
        let mut h = Sha256::new();
        h.update(format!("command={command}\n"));
        h.update(canonical_config);
        for (k, v) in overrides {
            h.update(format!("{k}={v}\n"));
        }
        let config_hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Self { command: command.to_string(), config_hash }
    }

    fn header_lines(&self) -> [String; 4] {
        [
            format!("# tool: bec-cavity {}", env!("CARGO_PKG_VERSION")),
            format!("# command: {}", self.command),
            format!("# config_sha256: {}", self.config_hash),
            format!("# units: {UNITS}"),
        ]
    }

    pub fn json(&self) -> Value {
        json!({
            "tool": "bec-cavity",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config_sha256": self.config_hash,
            "units": UNITS,
        })
    }
}

pub struct Csv {
    columns: Vec<String>,
    rows: Vec<String>,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells.join(","));
    }

    pub fn render(&self, meta: &Metadata, extra: &[String]) -> String {
        let mut out = String::new();
        for l in meta.header_lines().iter().chain(extra) {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip decimal, scientific outside [1e-4, 1e15).
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub struct OutDir {
    root: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, meta: &Metadata, mut body: Value) -> Result<(), CliError> {
        if let Value::Object(m) = &mut body {
            m.insert("metadata".into(), meta.json());
        }
        let mut text = serde_json::to_string_pretty(&body).expect("json values serialize");
        text.push('\n');
        self.write(name, &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_overrides() {
        let a = Metadata::new("evolve", "[params]\n", &[("seed_amplitude", "0.1".into())]);
        let b = Metadata::new("evolve", "[params]\n", &[("seed_amplitude", "0.2".into())]);
        let c = Metadata::new("evolve", "[params]\n", &[("seed_amplitude", "0.1".into())]);
        assert_ne!(a.config_hash, b.config_hash);
        assert_eq!(a.config_hash, c.config_hash);
        assert_eq!(a.config_hash.len(), 64);
    }

    #[test]
    fn csv_has_header_then_columns() {
        let m = Metadata::new("closed", "", &[]);
        let mut t = Csv::new(&["x", "y"]);
        t.row(&[num(0.1), num(-2.0)]);
        let s = t.render(&m, &[]);
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[..4].iter().all(|l| l.starts_with("# ")));
        assert_eq!(&lines[4..], ["x,y", "0.1,-2"]);
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -2.0, 8.688355492909805e-48, 3.2e20, 1e-4, 123.456] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1.5e-9), "1.5e-9");
        assert_eq!(num(f64::NAN), "NaN");
    }
}
