//! On-disk formats: sample and trace CSV files and their JSON manifest
//! sidecars.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use permlab_core::geodesic::GeodesicTrace;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const SAMPLES_SCHEMA: &str = "perm-samples-v1";
pub const TRACE_SCHEMA: &str = "perm-trace-v1";
pub const SCHUR_SCHEMA: &str = "perm-schur-v1";
pub const REPORT_SCHEMA: &str = "perm-report-v1";

pub const SAMPLES_HEADER: [&str; 2] = ["re", "im"];
pub const TRACE_HEADER: [&str; 4] = ["t", "re", "im", "f"];

pub fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// 17 significant digits: enough to round-trip every double.
pub fn float_field(x: f64) -> String {
    format!("{x:.16e}")
}

/// Provenance record stored next to every dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub command: String,
    /// File name of the dataset this manifest describes.
    pub data: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub engine: String,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
}

impl RunManifest {
    pub fn parameter_u64(&self, key: &str) -> Result<u64, CliError> {
        self.parameters
            .get(key)
            .and_then(Value::as_u64)
            .ok_or_else(|| CliError::usage(format!("manifest lacks integer parameter {key:?}")))
    }

    pub fn parameter_str(&self, key: &str) -> Result<&str, CliError> {
        self.parameters
            .get(key)
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::usage(format!("manifest lacks string parameter {key:?}")))
    }
}

/// `<data>.manifest.json`.
pub fn manifest_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    data.with_file_name(name)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::numeric(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_manifest(data: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    write_json(&manifest_path(data), manifest)
}

pub fn read_manifest(data: &Path) -> Result<RunManifest, CliError> {
    let path = manifest_path(data);
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::usage(format!("missing manifest {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad manifest {}: {e}", path.display())))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::usage(format!("{}: {e}", path.display()))
}

pub fn write_samples(path: &Path, values: &[Complex64]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(SAMPLES_HEADER).map_err(|e| csv_error(path, e))?;
    for z in values {
        w.write_record([float_field(z.re), float_field(z.im)]).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_trace(path: &Path, trace: &GeodesicTrace) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(TRACE_HEADER).map_err(|e| csv_error(path, e))?;
    for ((&t, p), f) in trace.ts.iter().zip(&trace.perms).zip(&trace.f_values) {
        let f = f.map(float_field).unwrap_or_default();
        w.write_record([float_field(t), float_field(p.re), float_field(p.im), f]).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads the `re` and `im` columns of a sample or trace file.
pub fn read_values(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = r.headers().map_err(|e| csv_error(path, e))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::usage(format!("{}: no {name:?} column", path.display())))
    };
    let (re, im) = (column("re")?, column("im")?);
    let mut out = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let field = |k: usize| -> Result<f64, CliError> {
            record
                .get(k)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::usage(format!("{}: bad number on data row {}", path.display(), line + 1)))
        };
        out.push(Complex64::new(field(re)?, field(im)?));
    }
    Ok(out)
}
