//! Output directory bookkeeping and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
pub struct Stage {
    pub name: String,
    pub wall_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Everything needed to tell whether two runs should agree byte for byte.
/// Only `stages` carries wall-clock data.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub dealias: bool,
    pub stages: Vec<Stage>,
    pub outputs: Vec<OutputFile>,
}

pub struct Run {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Run {
    pub fn new(dir: &Path, command: &str, config_json: &str, seed: Option<u64>, dealias: bool) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                command: command.to_string(),
                version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
                config_sha256: sha256_hex(config_json.as_bytes()),
                seed,
                dealias,
                stages: Vec::new(),
                outputs: Vec::new(),
            },
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Time `f` as a named stage.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let v = f()?;
        self.manifest.stages.push(Stage {
            name: name.to_string(),
            wall_seconds: t.elapsed().as_secs_f64(),
        });
        Ok(v)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let p = self.path(name);
        fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
        self.record(name)
    }

    /// Register a file already written under the output directory.
    pub fn record(&mut self, name: &str) -> Result<()> {
        let p = self.path(name);
        let bytes = fs::read(&p).with_context(|| format!("reading back {}", p.display()))?;
        self.manifest.outputs.push(OutputFile {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.manifest.outputs.sort_by(|a, b| a.path.cmp(&b.path));
        let p = self.path("manifest.json");
        let text = serde_json::to_string_pretty(&self.manifest)? + "\n";
        fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
        Ok(p)
    }
}
