//! Run manifests: the resolved config plus a `[provenance]` table.
//!
//! The timestamp honours `SOURCE_DATE_EPOCH`, so reruns with it set produce
//! identical manifests.

use std::path::Path;
use std::time::{Duration, SystemTime};

use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// Every verdict passed.
    Pass,
    /// At least one verdict failed.
    Fail,
    /// The module returned an error.
    Error,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass => 0,
            Self::Fail => 1,
            Self::Error => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub config_hash: String,
    pub timestamp: String,
    pub version: String,
    pub status: RunStatus,
    pub error: Option<String>,
}

/// SHA-256 of the canonical config text, hex encoded.
pub fn config_hash(cfg: &RunConfig) -> String {
    hex::encode(Sha256::digest(cfg.to_toml().as_bytes()))
}

/// RFC 3339 time of the run, taken from `SOURCE_DATE_EPOCH` when it is set.
pub fn timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .map(|secs| SystemTime::UNIX_EPOCH + Duration::from_secs(secs))
        .unwrap_or_else(SystemTime::now);
    humantime::format_rfc3339_seconds(now).to_string()
}

impl Provenance {
    pub fn new(cfg: &RunConfig, status: RunStatus, error: Option<String>) -> Self {
        Self {
            config_hash: config_hash(cfg),
            timestamp: timestamp(),
            version: VERSION.to_string(),
            status,
            error,
        }
    }
}

pub fn render_manifest(cfg: &RunConfig, prov: &Provenance) -> String {
    let mut doc: Table = cfg.to_toml().parse().expect("canonical config parses");
    let mut p = Table::new();
    p.insert("config_hash".into(), Value::String(prov.config_hash.clone()));
    p.insert("timestamp".into(), Value::String(prov.timestamp.clone()));
    p.insert("version".into(), Value::String(prov.version.clone()));
    p.insert("status".into(), Value::String(prov.status.name().into()));
    if let Some(e) = &prov.error {
        p.insert("error".into(), Value::String(e.clone()));
    }
    doc.insert("provenance".into(), Value::Table(p));
    toml::to_string(&doc).expect("manifest serializes")
}

pub fn write_manifest(cfg: &RunConfig, prov: &Provenance, path: &Path) -> Result<()> {
    std::fs::write(path, render_manifest(cfg, prov)).map_err(|e| HarnessError::io(path, e))
}
