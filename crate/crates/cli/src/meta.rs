//! Run-metadata records: seed, configuration, and content digests of the
//! inputs, written as plain `key = value` text.

use std::fmt::Display;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

#[derive(Debug, Default, Clone)]
pub struct RunMetadata {
    entries: Vec<(String, String)>,
}

impl RunMetadata {
    pub fn new(tool: &str) -> Self {
        let mut m = RunMetadata::default();
        m.push("tool", tool);
        m.push("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    /// SHA-256 content digest of an input file.
    pub fn push_digest(&mut self, key: &str, path: &Path) -> Result<()> {
        let bytes = fs::read(path).with_context(|| format!("read {path:?}"))?;
        let mut h = Sha256::new();
        h.update(&bytes);
        self.push(key, format!("sha256:{:x}", h.finalize()));
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        fs::write(path, out).with_context(|| format!("write {path:?}"))?;
        Ok(())
    }
}
