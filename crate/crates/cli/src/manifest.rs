//! Reproduction manifests: every command leaves a `manifest.txt` beside its
//! outputs recording the seed, a digest of the config file, and digests of
//! every input and output, so a rerun can be checked byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

pub struct Manifest {
    command: String,
    seed: u64,
    config_digest: Option<String>,
    inputs: Vec<(String, String)>,
    outputs: Vec<(String, String)>,
    out_dir: PathBuf,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, out_dir: &Path) -> Result<Self> {
        fs::create_dir_all(out_dir)
            .with_context(|| format!("creating output directory {}", out_dir.display()))?;
        Ok(Self {
            command: command.to_string(),
            seed,
            config_digest: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            out_dir: out_dir.to_path_buf(),
        })
    }

    /// Records the config file's digest (if one was given).
    pub fn record_config(&mut self, path: Option<&Path>) -> Result<()> {
        if let Some(p) = path {
            let bytes =
                fs::read(p).with_context(|| format!("reading config file {}", p.display()))?;
            self.config_digest = Some(sha256_hex(&bytes));
        }
        Ok(())
    }

    /// Reads an input file, recording its digest.
    pub fn read_input(&mut self, path: &Path) -> Result<String> {
        let bytes =
            fs::read(path).with_context(|| format!("reading input file {}", path.display()))?;
        self.inputs
            .push((path.display().to_string(), sha256_hex(&bytes)));
        String::from_utf8(bytes)
            .with_context(|| format!("input file {} is not UTF-8", path.display()))
    }

    /// Writes one output file into the output directory, recording its digest.
    pub fn write_output(&mut self, name: &str, content: &str) -> Result<PathBuf> {
        let path = self.out_dir.join(name);
        fs::write(&path, content)
            .with_context(|| format!("writing output file {}", path.display()))?;
        self.outputs
            .push((name.to_string(), sha256_hex(content.as_bytes())));
        Ok(path)
    }

    /// Writes `manifest.txt` and returns its path.
    pub fn finish(self) -> Result<PathBuf> {
        let mut text = String::new();
        let _ = writeln!(text, "command = {}", self.command);
        let _ = writeln!(text, "seed = {}", self.seed);
        let _ = writeln!(
            text,
            "config = {}",
            self.config_digest
                .map_or_else(|| "none".to_string(), |d| format!("sha256:{d}"))
        );
        for (path, digest) in &self.inputs {
            let _ = writeln!(text, "input {path} = sha256:{digest}");
        }
        for (name, digest) in &self.outputs {
            let _ = writeln!(text, "output {name} = sha256:{digest}");
        }
        let path = self.out_dir.join("manifest.txt");
        fs::write(&path, text)
            .with_context(|| format!("writing manifest {}", path.display()))?;
        Ok(path)
    }
}
