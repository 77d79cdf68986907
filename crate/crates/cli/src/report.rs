//! Schema-versioned JSON report envelope.

use crate::{CliError, CliResult, Config};
use serde::Serialize;
use serde_json::Value;
use std::io::Write;

pub const SCHEMA: &str = "v1";

#[derive(Clone, Debug, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: CommandEcho,
    pub config: Config,
    pub results: Value,
    pub residuals: Value,
    pub timing: Timing,
}

impl Report {
    pub fn to_json(&self) -> CliResult<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Input(format!("cannot serialize report: {e}")))
    }
}

/// Serializes any value to a JSON tree; non-finite floats become `null`.
pub fn to_value<T: Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Input(format!("cannot serialize: {e}")))
}

/// Writes `text` to `path`, `-` meaning standard output.
pub fn emit(path: &str, text: &str) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Input(format!("cannot write {path}: {e}"));
    if path == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes()).map_err(io)?;
        if !text.ends_with('\n') {
            out.write_all(b"\n").map_err(io)?;
        }
        out.flush().map_err(io)
    } else {
        let mut body = text.to_owned();
        if !body.ends_with('\n') {
            body.push('\n');
        }
        std::fs::write(path, body).map_err(io)
    }
}
