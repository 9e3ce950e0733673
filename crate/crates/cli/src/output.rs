//! CSV and JSON writers with reproducible formatting.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Config;
use crate::Failure;

/// Formats `v` with 12 significant digits: plain decimal for exponents in
/// `[-5, 12)`, scientific otherwise.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.11e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).expect("exponent");
    if (-5..12).contains(&exp) {
        format!("{v:.*}", (11 - exp) as usize)
    } else {
        sci
    }
}

/// A table with a fixed header, written as LF-terminated CSV.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// One CSV cell.
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(
            row.into_iter()
                .map(|c| match c {
                    Cell::Num(v) => fmt_num(v),
                    Cell::Text(t) => t,
                })
                .collect(),
        );
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Output directory and file-name stem for one invocation.
pub struct Sink {
    pub dir: PathBuf,
    pub stem: String,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, stem: &str) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Sink { dir: dir.to_path_buf(), stem: stem.to_string(), written: Vec::new() })
    }

    fn write(&mut self, name: String, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    /// Writes `<stem>_<kind>.csv`.
    pub fn csv(&mut self, kind: &str, table: &Table) -> Result<(), Failure> {
        self.write(format!("{}_{kind}.csv", self.stem), &table.to_bytes())
    }

    /// Writes `<stem>_summary.json` for `run` and `<stem>_<command>_summary.json`
    /// otherwise, with the tool version, the command and the resolved
    /// configuration.
    pub fn summary<R: Serialize>(&mut self, command: &str, config: &Config, results: &R) -> Result<(), Failure> {
        #[derive(Serialize)]
        struct Summary<'a, R> {
            tool: &'static str,
            version: &'static str,
            command: &'a str,
            config: &'a Config,
            results: &'a R,
        }
        let s = Summary { tool: "leakctl", version: env!("CARGO_PKG_VERSION"), command, config, results };
        let mut text = serde_json::to_string_pretty(&s).map_err(|e| Failure::Io(format!("summary: {e}")))?;
        text.push('\n');
        let name = match command {
            "run" => format!("{}_summary.json", self.stem),
            other => format!("{}_{other}_summary.json", self.stem),
        };
        self.write(name, text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.999123456789123), "0.999123456789");
        assert_eq!(fmt_num(1.0), "1.00000000000");
        assert_eq!(fmt_num(-0.15 * std::f64::consts::PI), "-0.471238898038");
        assert_eq!(fmt_num(188495559.215), "188495559.215");
        assert_eq!(fmt_num(1.5e-9), "1.50000000000e-9");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(9.99999999999e-1), "0.999999999999");
        assert_eq!(fmt_num(9.9999999999999e-1), "1.00000000000");
    }

    #[test]
    fn csv_uses_lf_and_fixed_header() {
        let mut t = Table::new(&["x", "f"]);
        t.push(vec![Cell::from(0.5), Cell::from("a,b")]);
        assert_eq!(String::from_utf8(t.to_bytes()).unwrap(), "x,f\n0.500000000000,\"a,b\"\n");
    }
}
