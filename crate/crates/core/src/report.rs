//! The JSON report document, its CSV rendering and the determinism hash.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::verify::{tally, CheckReport, Status};

pub const REPORT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: Value,
    pub results: Vec<CheckReport>,
}

impl Report {
    pub fn new(config: &RunConfig, results: Vec<CheckReport>) -> Self {
        Report {
            version: REPORT_VERSION.to_string(),
            config: config.to_json(),
            results,
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("malformed report: {e}")))
    }

    /// SHA-256 over the compact document with every `ms` field removed.
    pub fn determinism_hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("serializable");
        if let Some(results) = v["results"].as_array_mut() {
            for r in results {
                r.as_object_mut().map(|o| o.remove("ms"));
            }
        }
        let bytes = serde_json::to_vec(&v).expect("serializable");
        hex::encode(Sha256::digest(&bytes))
    }

    /// `(pass, fail, skipped)`.
    pub fn tally(&self) -> (usize, usize, usize) {
        tally(&self.results)
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    /// One row per check: `check,status,params,witness,ms`, the JSON
    /// columns in compact form.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["check", "status", "params", "witness", "ms"])
            .map_err(io)?;
        for r in &self.results {
            let status = serde_json::to_value(r.status).expect("serializable");
            w.write_record([
                r.check.as_str(),
                status.as_str().unwrap(),
                &r.params.to_string(),
                &r.witness.to_string(),
                &r.ms.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf-8"))
    }
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let mut file = std::fs::File::create(&tmp).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}
