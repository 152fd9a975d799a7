use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const UNITS: &str = "atomic";

/// Resolved configuration plus its digest, stamped on every output.
pub struct Header {
    pub config: Value,
    pub hash: String,
}

impl Header {
    pub fn new(config: Value) -> Self {
        let hash = sha256_hex(&config.to_string());
        Header { config, hash }
    }

    pub fn csv_lines(&self, note: Option<&str>) -> String {
        let mut out =
            format!("# vibsim {}\n# config_hash: sha256:{}\n# units: {UNITS}", env!("CARGO_PKG_VERSION"), self.hash);
        if let Some(note) = note {
            let _ = write!(out, " ({note})");
        }
        let _ = write!(out, "\n# config: {}\n", self.config);
        out
    }

    pub fn json(&self) -> Value {
        json!({
            "tool": "vibsim",
            "version": env!("CARGO_PKG_VERSION"),
            "config_hash": format!("sha256:{}", self.hash),
            "units": UNITS,
            "config": self.config,
        })
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn json_document(header: &Header, result: Value) -> Result<String, CliError> {
    let doc = json!({ "header": header.json(), "result": result });
    let mut text = serde_json::to_string_pretty(&doc).map_err(vibsim::VibError::from)?;
    text.push('\n');
    Ok(text)
}

pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(vibsim::VibError::from)?;
            Ok(())
        }
    }
}
