//! Per-run output directories and manifests.
//!
//! Files are written as `<name>.partial` and renamed only when the run is
//! finalized; `manifest.json` is renamed last, so its presence marks a
//! complete directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{DataConfig, GridConfig};
use crate::error::{HarnessError, Result};

pub const MANIFEST: &str = "manifest.json";
pub const PARTIAL_SUFFIX: &str = ".partial";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeDescriptor {
    pub kind: String,
    pub epsilon: f64,
    pub nu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataDescriptor {
    pub family: String,
    #[serde(flatten)]
    pub params: DataConfig,
    /// Oscillation amplitude actually used at this `epsilon`.
    pub amp_effective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub status: String,
    pub steps: usize,
    pub final_time: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    /// The run reached `t_end` without losing regularity.
    pub regularity: bool,
    /// The outer-strip mass stayed below the limit at every stored time.
    pub boundary_mass: bool,
    pub boundary_mass_fraction: f64,
    pub boundary_mass_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub max_defect: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub manifest_version: u32,
    pub config_hash: String,
    pub created: String,
    pub solver_version: String,
    pub regime: RegimeDescriptor,
    pub grid: GridConfig,
    pub data: DataDescriptor,
    pub run: RunSummary,
    pub validity: Validity,
    pub energy_ledger: Option<LedgerSummary>,
    pub outputs: Vec<OutputFile>,
}

impl ExperimentManifest {
    pub fn is_valid(&self) -> bool {
        self.validity.regularity && self.validity.boundary_mass
    }
}

/// Writer for one output directory.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputDir {
    /// Creates `root` and removes a manifest left by an earlier run.
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| HarnessError::io(root, e))?;
        let old = root.join(MANIFEST);
        if old.exists() {
            fs::remove_file(&old).map_err(|e| HarnessError::io(&old, e))?;
        }
        Ok(OutputDir { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, kind: &str, t: Option<f64>, bytes: &[u8]) -> Result<()> {
        let p = self.root.join(format!("{name}{PARTIAL_SUFFIX}"));
        fs::write(&p, bytes).map_err(|e| HarnessError::io(&p, e))?;
        self.files.push(OutputFile { path: name.to_string(), bytes: bytes.len() as u64, kind: kind.to_string(), t });
        Ok(())
    }

    /// Renames all partial files, then writes the manifest built from the
    /// file list.
    pub fn finalize<T: Serialize>(self, build: impl FnOnce(Vec<OutputFile>) -> T) -> Result<T> {
        for f in &self.files {
            let from = self.root.join(format!("{}{PARTIAL_SUFFIX}", f.path));
            let to = self.root.join(&f.path);
            fs::rename(&from, &to).map_err(|e| HarnessError::io(&from, e))?;
        }
        let manifest = build(self.files);
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let tmp = self.root.join(format!("{MANIFEST}{PARTIAL_SUFFIX}"));
        fs::write(&tmp, text).map_err(|e| HarnessError::io(&tmp, e))?;
        let dst = self.root.join(MANIFEST);
        fs::rename(&tmp, &dst).map_err(|e| HarnessError::io(&tmp, e))?;
        Ok(manifest)
    }
}

/// Checks that every listed output exists with its recorded length.
pub fn check_outputs(root: &Path, files: &[OutputFile]) -> Result<()> {
    for f in files {
        let p = root.join(&f.path);
        let len = fs::metadata(&p).map_err(|e| HarnessError::io(&p, e))?.len();
        if len != f.bytes {
            return Err(HarnessError::Io {
                path: p.display().to_string(),
                source: std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("length {len} differs from recorded {}", f.bytes),
                ),
            });
        }
    }
    Ok(())
}

pub fn read_manifest(root: &Path) -> Result<ExperimentManifest> {
    let p = root.join(MANIFEST);
    let text = fs::read_to_string(&p).map_err(|e| HarnessError::io(&p, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", p.display())))
}
