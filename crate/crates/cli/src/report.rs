//! Report envelope: `{schema, command, manifest, result}` in `report.json`
//! plus CSV side tables under `tables/`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::SeedSource;

pub const SCHEMA: &str = "cvc-report/1";

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest<C: Serialize> {
    pub command: String,
    pub args: Vec<String>,
    pub config: C,
    pub seed: u64,
    pub seed_source: SeedSource,
    pub version: &'static str,
    pub started_at: String,
    pub finished_at: String,
    pub inputs: Vec<InputDigest>,
}

#[derive(Debug, Serialize)]
struct Report<'a, C: Serialize, R: Serialize> {
    schema: &'static str,
    command: &'a str,
    manifest: &'a Manifest<C>,
    result: &'a R,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Reads an input file and records its digest.
pub fn read_input(path: &Path) -> Result<(Vec<u8>, InputDigest), CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let digest = InputDigest {
        path: path.display().to_string(),
        bytes: bytes.len() as u64,
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    Ok((bytes, digest))
}

pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&'static str]) -> Self {
        Table {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal form; `NA` for missing or non-finite values.
pub fn num(v: impl Into<Option<f64>>) -> String {
    match v.into() {
        Some(x) if x.is_finite() => format!("{x}"),
        _ => "NA".to_string(),
    }
}

pub fn write_outputs<C: Serialize, R: Serialize>(
    out: &Path,
    command: &str,
    manifest: &Manifest<C>,
    result: &R,
    tables: &[Table],
) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| CliError::Output(format!("{}: {e}", out.display()));
    let table_dir = out.join("tables");
    fs::create_dir_all(&table_dir).map_err(io)?;
    for t in tables {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(table_dir.join(format!("{}.csv", t.name)))
            .map_err(|e| CliError::Output(e.to_string()))?;
        w.write_record(&t.header).map_err(|e| CliError::Output(e.to_string()))?;
        for row in &t.rows {
            w.write_record(row).map_err(|e| CliError::Output(e.to_string()))?;
        }
        w.flush().map_err(io)?;
    }
    let report = Report {
        schema: SCHEMA,
        command,
        manifest,
        result,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    let path = out.join("report.json");
    fs::write(&path, text).map_err(io)?;
    Ok(path)
}

pub fn args() -> Vec<String> {
    std::env::args().collect()
}
