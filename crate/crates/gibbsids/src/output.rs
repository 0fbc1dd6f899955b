//! Result tables, certification checks, and the files a run leaves behind.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// One CSV value.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Real(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Real(x) if x.is_nan() => f.write_str("nan"),
            Value::Real(x) if x.is_infinite() => f.write_str(if *x > 0.0 { "inf" } else { "-inf" }),
            Value::Real(x) => write!(f, "{x:?}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Text(s) => f.write_str(s),
            Value::Flag(b) => f.write_str(if *b { "true" } else { "false" }),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n as i64)
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Value::Int(n as i64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Flag(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

/// A named table; the main table of a run has no suffix.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub suffix: Option<&'static str>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(suffix: Option<&'static str>, header: &[&'static str]) -> Self {
        Table {
            suffix,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// CSV body: header row, comma separated, LF endings.
    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
    }
}

/// Outcome of one certification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Signed distance to failure (positive when passing), in the check's own units.
    pub margin: f64,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, margin: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            margin,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status}  {}  margin={:.6e}  {}", self.name, self.margin, self.detail)
    }
}

/// Everything an experiment produces.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    config_hash: &'a str,
    toolkit_version: &'a str,
    seed: u64,
    jobs: usize,
    started: String,
    finished: String,
    outputs: Vec<String>,
    status: &'a str,
    checks: &'a [Check],
}

/// Identity of a run for file naming and the manifest.
pub struct RunInfo<'a> {
    pub experiment: &'a str,
    pub hash: &'a str,
    pub seed: u64,
    pub jobs: usize,
    pub started: chrono::DateTime<chrono::Utc>,
}

fn file_name(experiment: &str, suffix: Option<&str>, hash: &str) -> String {
    match suffix {
        None => format!("{experiment}__{hash}.csv"),
        Some(s) => format!("{experiment}-{s}__{hash}.csv"),
    }
}

/// Writes every table and the manifest into `dir`; on failure removes what it wrote.
pub fn write_outputs(dir: &Path, info: &RunInfo, report: &Report) -> std::io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let result = write_all(dir, info, report, &mut written);
    if result.is_err() {
        remove_all(&written);
    }
    result.map(|_| written)
}

fn write_all(dir: &Path, info: &RunInfo, report: &Report, written: &mut Vec<PathBuf>) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    for table in &report.tables {
        let name = file_name(info.experiment, table.suffix, info.hash);
        let path = dir.join(&name);
        let body = table.to_csv().map_err(std::io::Error::other)?;
        written.push(path.clone());
        fs::write(&path, body)?;
        names.push(name);
    }
    let manifest_name = format!("{}__{}.manifest.json", info.experiment, info.hash);
    names.push(manifest_name.clone());
    let manifest = Manifest {
        experiment: info.experiment,
        config_hash: info.hash,
        toolkit_version: env!("CARGO_PKG_VERSION"),
        seed: info.seed,
        jobs: info.jobs,
        started: info.started.to_rfc3339(),
        finished: chrono::Utc::now().to_rfc3339(),
        outputs: names,
        status: if report.passed() { "PASS" } else { "FAIL" },
        checks: &report.checks,
    };
    let path = dir.join(manifest_name);
    written.push(path.clone());
    fs::write(&path, serde_json::to_vec_pretty(&manifest).map_err(std::io::Error::other)?)?;
    Ok(())
}

pub fn remove_all(paths: &[PathBuf]) {
    for p in paths {
        let _ = fs::remove_file(p);
    }
}
