//! Report assembly and deterministic output.

use crate::config::RunConfig;
use crate::error::CliError;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

pub const REPORT_SCHEMA: &str = "sdtwistor.report/v1";

/// One named check with its measured value and tolerance. Skipped checks
/// carry a reason and count as neither pass nor fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl Check {
    /// Passes when value ≤ tolerance.
    pub fn below(cfg: &RunConfig, name: &str, value: f64) -> Self {
        let tol = cfg.tolerance(name);
        Self { name: name.into(), value: Some(value), tolerance: Some(tol), pass: Some(value <= tol), skipped: None }
    }

    /// A boolean condition with an informational value.
    pub fn condition(name: &str, value: f64, pass: bool) -> Self {
        Self { name: name.into(), value: Some(value), tolerance: None, pass: Some(pass), skipped: None }
    }

    pub fn skipped(name: &str, reason: &str) -> Self {
        Self { name: name.into(), value: None, tolerance: None, pass: None, skipped: Some(reason.into()) }
    }
}

/// Top-level JSON report: schema id, command, echoed configuration,
/// checks and command-specific details.
#[derive(Debug, Serialize)]
pub struct Report<D: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub config: RunConfig,
    pub all_pass: bool,
    pub checks: Vec<Check>,
    pub details: D,
}

impl<D: Serialize> Report<D> {
    pub fn new(command: &'static str, config: &RunConfig, checks: Vec<Check>, details: D) -> Self {
        let all_pass = checks.iter().all(|c| c.pass != Some(false));
        Self { schema: REPORT_SCHEMA, command, config: config.clone(), all_pass, checks, details }
    }
}

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Ok(Self(path.to_path_buf()))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json { path: p.display().to_string(), source })?;
        text.push('\n');
        fs::write(&p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
        Ok(p)
    }

    /// Write rows of a serializable record type with a header line.
    pub fn write_csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        let err = |source| CliError::Csv { path: p.display().to_string(), source };
        let mut w = csv::Writer::from_path(&p).map_err(err)?;
        for r in rows {
            w.serialize(r).map_err(err)?;
        }
        w.flush().map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
        Ok(p)
    }
}
