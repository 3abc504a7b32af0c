//! Output directory with atomic writes and a manifest of every file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";
pub const CONFIG_COPY: &str = "config.toml";

#[derive(Debug, Serialize)]
struct OutputEntry {
    file: String,
    sha256: String,
    bytes: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    seed: u64,
    /// Hash of the resolved configuration; results depend on nothing else
    /// except `seed`.
    config_sha256: String,
    config: &'a C,
    outputs: &'a [OutputEntry],
}

pub struct OutputDir {
    dir: PathBuf,
    outputs: Vec<OutputEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    /// Writes through a temporary file so readers never see partial output.
    fn write_raw(&self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("renaming to {}", path.display()))?;
        Ok(())
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        self.write_raw(name, bytes)?;
        self.outputs.push(OutputEntry {
            file: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(())
    }

    pub fn write_csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().context("flushing csv")?;
        self.write(name, &bytes)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    /// Writes the resolved configuration and the manifest.
    pub fn finish<C: Serialize>(self, subcommand: &str, section: &str, config: &C, seed: u64) -> Result<PathBuf> {
        let mut table = toml::Table::new();
        table.insert(section.to_string(), toml::Value::try_from(config)?);
        let config_text = toml::to_string(&table)?;
        self.write_raw(CONFIG_COPY, config_text.as_bytes())?;
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            seed,
            config_sha256: sha256_hex(config_text.as_bytes()),
            config,
            outputs: &self.outputs,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        self.write_raw(MANIFEST, &bytes)?;
        Ok(self.dir.join(MANIFEST))
    }
}
