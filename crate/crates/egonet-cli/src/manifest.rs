//! Run manifests: a flat key=value record written beside every command's
//! outputs, sufficient to re-execute the run bit-identically.
//!
//! Layout (keys sorted, one per line):
//!
//! ```text
//! command=hub
//! input_digest.in=sha256:…
//! master_seed=11
//! param.coverage=0.95
//! param.in=d.csv
//! …
//! tool_version=0.1.0
//! ```
//!
//! `param.*` keys are the command's long flag names, so an argv can be
//! reconstructed mechanically: `--<key> <value>` per parameter, bare
//! `--<key>` for `true` booleans, nothing for `false`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub master_seed: Option<u64>,
    pub tool_version: String,
    pub input_digests: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            ..Default::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn param_opt(&mut self, key: &str, value: Option<impl Display>) -> &mut Self {
        if let Some(v) = value {
            self.param(key, v);
        }
        self
    }

    pub fn flag(&mut self, key: &str, on: bool) -> &mut Self {
        self.param(key, on)
    }

    /// Records the master seed both as metadata and as the `seed` parameter.
    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.master_seed = Some(seed);
        self.param("seed", seed)
    }

    /// Hashes an input file under `input_digest.<flag>`.
    pub fn digest_input(&mut self, flag: &str, path: &Path) -> Result<&mut Self> {
        let bytes = fs::read(path)
            .with_context(|| format!("reading input `{}` for digest", path.display()))?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.input_digests
            .insert(flag.to_string(), format!("sha256:{hex}"));
        Ok(self)
    }

    pub fn render(&self) -> String {
        let mut lines = Vec::new();
        lines.push(format!("command={}", self.command));
        for (k, v) in &self.input_digests {
            lines.push(format!("input_digest.{k}={v}"));
        }
        if let Some(seed) = self.master_seed {
            lines.push(format!("master_seed={seed}"));
        }
        for (k, v) in &self.parameters {
            lines.push(format!("param.{k}={v}"));
        }
        lines.push(format!("tool_version={}", self.tool_version));
        lines.join("\n") + "\n"
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())
            .with_context(|| format!("writing manifest `{}`", path.display()))
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading manifest `{}`", path.display()))?;
        let mut manifest = RunManifest::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("manifest line {} is not key=value: `{line}`", i + 1);
            };
            if key == "command" {
                manifest.command = value.to_string();
            } else if key == "master_seed" {
                manifest.master_seed = Some(value.parse().context("bad master_seed")?);
            } else if key == "tool_version" {
                manifest.tool_version = value.to_string();
            } else if let Some(flag) = key.strip_prefix("input_digest.") {
                manifest.input_digests.insert(flag.to_string(), value.to_string());
            } else if let Some(param) = key.strip_prefix("param.") {
                manifest.parameters.insert(param.to_string(), value.to_string());
            } else {
                bail!("manifest line {} has unknown key `{key}`", i + 1);
            }
        }
        if manifest.command.is_empty() {
            bail!("manifest has no command");
        }
        Ok(manifest)
    }

    /// Reconstructs an argv (program name first) that re-executes this run.
    pub fn to_argv(&self, program: &str) -> Vec<String> {
        let mut argv = vec![program.to_string(), self.command.clone()];
        for (key, value) in &self.parameters {
            match value.as_str() {
                "true" => argv.push(format!("--{key}")),
                "false" => {}
                _ => {
                    argv.push(format!("--{key}"));
                    argv.push(value.clone());
                }
            }
        }
        argv
    }
}

/// Manifest path for a single-file output: `<out>.manifest`.
pub fn manifest_path_beside(out: &Path) -> std::path::PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest");
    out.with_file_name(name)
}
