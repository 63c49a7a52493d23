use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub inputs: Value,
    pub result: Value,
}

impl RunReport {
    pub fn new(
        command: &str,
        seed: u64,
        inputs: Value,
        result: impl Serialize,
    ) -> Result<Self, CliError> {
        Ok(RunReport {
            tool: "nlg",
            version: VERSION,
            command: command.to_string(),
            seed,
            inputs,
            result: serde_json::to_value(result)
                .map_err(|e| CliError::Validation(e.to_string()))?,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Writes `text` to `path` via a temp file in the same directory and a rename,
/// or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(text.as_bytes()).map_err(io_err);
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(text.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Validation(format!("output: {e}"))
}
