use super::config::ExperimentConfig;
use crate::error::Result;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};

/// Shortest decimal that round-trips, in exponent form outside `[1e-4, 1e15)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => format_float(*x),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

/// One CSV table.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub file_name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Series {
    pub fn new(file_name: impl Into<String>, header: &[&'static str]) -> Self {
        Self { file_name: file_name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything an experiment produces. `summary` holds only deterministic
/// values; wall-clock timings go to the manifest.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub experiment: String,
    pub series: Vec<Series>,
    pub summary: Map<String, Value>,
    pub checks: Vec<CheckOutcome>,
    pub timings: Map<String, Value>,
}

impl ExperimentOutput {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            series: Vec::new(),
            summary: Map::new(),
            checks: Vec::new(),
            timings: Map::new(),
        }
    }

    pub fn metric(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckOutcome { name: name.to_string(), passed, detail: detail.into() });
    }

    pub fn timing(&mut self, key: &str, secs: f64) {
        self.timings.insert(key.to_string(), Value::from(secs));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary_value(&self) -> Value {
        let mut m = self.summary.clone();
        m.insert("checks".into(), serde_json::to_value(&self.checks).unwrap_or(Value::Null));
        m.insert("passed".into(), Value::from(self.passed()));
        Value::Object(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub threads: usize,
    pub started_unix_secs: u64,
    pub wall_clock_secs: f64,
    pub files: Vec<String>,
    pub summary: Value,
    pub timings: Value,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, threads: usize) -> Self {
        let started = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            artifact: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            seed: config.seed,
            threads,
            started_unix_secs: started,
            wall_clock_secs: 0.0,
            files: Vec::new(),
            summary: Value::Null,
            timings: Value::Null,
        }
    }
}

/// Writes the CSV series, `summary.json` and `manifest.json`; with no
/// results only the manifest is written. Returns the paths written.
pub fn emit_outputs(
    results: &[ExperimentOutput],
    manifest: &RunManifest,
    output_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(output_dir)?;
    let mut manifest = manifest.clone();
    let mut written = Vec::new();
    let mut summary = Map::new();
    let mut timings = Map::new();
    for r in results {
        for s in &r.series {
            let path = output_dir.join(&s.file_name);
            std::fs::write(&path, s.to_csv_bytes()?)?;
            manifest.files.push(s.file_name.clone());
            written.push(path);
        }
        summary.insert(r.experiment.clone(), r.summary_value());
        timings.insert(r.experiment.clone(), Value::Object(r.timings.clone()));
    }
    if !results.is_empty() {
        let path = output_dir.join("summary.json");
        std::fs::write(&path, serde_json::to_string_pretty(&Value::Object(summary.clone()))? + "\n")?;
        manifest.files.push("summary.json".into());
        written.push(path);
        manifest.summary = Value::Object(summary);
        manifest.timings = Value::Object(timings);
    }
    let path = output_dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.0, 1.0, -2.5e-17, 3.0e20, std::f64::consts::PI, 1e-4, 123456.789] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_quotes_fields() {
        let mut s = Series::new("t.csv", &["name", "value"]);
        s.push(vec!["a,b".into(), 0.5.into()]);
        let text = String::from_utf8(s.to_csv_bytes().unwrap()).unwrap();
        assert_eq!(text, "name,value\r\n\"a,b\",0.5\r\n");
    }
}
