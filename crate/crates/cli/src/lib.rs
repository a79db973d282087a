//! Batch driver: builds systems from JSON configs, runs the verification
//! pipelines and writes JSON reports and CSV plot data.
//!
//! Exit codes: 0 all checks pass, 1 verification failure, 2 invalid input,
//! 3 I/O or malformed file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

pub mod commands;
pub mod config;
pub mod report;

pub use config::ExperimentConfig;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_IO: u8 = 3;

pub const THREADS_VAR: &str = "FRAME_FORGE_THREADS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: msg.into() }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: msg.into() }
    }

    /// Every failure while reading an input file is an I/O failure.
    pub fn load(path: &Path, err: frame_forge::Error) -> Self {
        Self::io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<frame_forge::Error> for CliError {
    fn from(err: frame_forge::Error) -> Self {
        use frame_forge::Error as E;
        match err {
            E::Io(_) | E::Format(_) => Self::io(err.to_string()),
            _ => Self::invalid(err.to_string()),
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub summary: Value,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub timestamp: bool,
}

pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

pub fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Thread count from `FRAME_FORGE_THREADS`; `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::invalid(format!("{THREADS_VAR} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}
