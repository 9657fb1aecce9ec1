//! Report assembly and atomic output.

use std::path::Path;
use std::time::Instant;

use fdk_core::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub struct ReportBuilder {
    command: String,
    started: Instant,
    pub input: serde_json::Value,
    pub parameters: serde_json::Value,
    pub outputs: serde_json::Value,
    pub arithmetic: String,
    pub ok: bool,
}

impl ReportBuilder {
    pub fn new(command: &str) -> Self {
        ReportBuilder {
            command: command.into(),
            started: Instant::now(),
            input: serde_json::Value::Null,
            parameters: serde_json::json!({}),
            outputs: serde_json::json!({}),
            arithmetic: "exact".into(),
            ok: true,
        }
    }

    pub fn finish(self, out: Option<&Path>) -> Result<bool> {
        let report = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "input": self.input,
            "parameters": self.parameters,
            "outputs": self.outputs,
            "ok": self.ok,
            "arithmetic": self.arithmetic,
            "timing_ms": self.started.elapsed().as_millis() as u64,
        });
        emit(&report, out)?;
        Ok(self.ok)
    }
}

/// Pretty-prints to stdout, or writes atomically (temp file + rename) so an
/// interrupt never leaves a partial report behind.
pub fn emit(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, &text)
                .map_err(|e| Error::BadInput(format!("cannot write `{}`: {e}", tmp.display())))?;
            std::fs::rename(&tmp, path)
                .map_err(|e| Error::BadInput(format!("cannot rename to `{}`: {e}", path.display())))?;
            Ok(())
        }
    }
}
