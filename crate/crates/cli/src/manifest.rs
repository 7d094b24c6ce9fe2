//! Per-command run manifests.

use std::path::{Path, PathBuf};

use recsel::util::sha256_hex;
use serde::Serialize;

use crate::config::{RunConfig, StageSeeds};
use crate::CliError;

pub const FILE_NAME: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct FileRecord {
    pub role: String,
    /// Relative to the output directory for pipeline artifacts, as configured otherwise.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub seeds: StageSeeds,
    pub timing: recsel::algo_features::landmark::TimingMode,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
}

/// Collects inputs and outputs of one command, then writes `manifest.json`
/// next to the outputs.
pub struct ManifestBuilder<'a> {
    cfg: &'a RunConfig,
    command: &'static str,
    dir: PathBuf,
    inputs: Vec<FileRecord>,
    outputs: Vec<String>,
}

fn digest(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| recsel::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(sha256_hex(&bytes))
}

impl<'a> ManifestBuilder<'a> {
    pub fn new(cfg: &'a RunConfig, command: &'static str, dir: PathBuf) -> Self {
        ManifestBuilder {
            cfg,
            command,
            dir,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn shown(&self, path: &Path) -> String {
        match path.strip_prefix(&self.cfg.out_dir) {
            Ok(rel) => rel.to_string_lossy().replace('\\', "/"),
            Err(_) => path.to_string_lossy().into_owned(),
        }
    }

    pub fn input(&mut self, role: &str, path: &Path) -> Result<(), CliError> {
        self.inputs.push(FileRecord {
            role: role.to_string(),
            path: self.shown(path),
            sha256: digest(path)?,
        });
        Ok(())
    }

    /// Registers a file already written under the command's directory.
    pub fn output(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    pub fn finish(self) -> Result<Manifest, CliError> {
        let outputs = self
            .outputs
            .iter()
            .map(|name| {
                let path = self.dir.join(name);
                Ok(FileRecord {
                    role: "output".into(),
                    path: self.shown(&path),
                    sha256: digest(&path)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let manifest = Manifest {
            command: self.command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: self.cfg.config_hash(),
            seed: self.cfg.seed,
            seeds: self.cfg.seeds(),
            timing: self.cfg.timing,
            inputs: self.inputs,
            outputs,
        };
        let path = self.dir.join(FILE_NAME);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| recsel::Error::Io { path, source: e })?;
        Ok(manifest)
    }
}
