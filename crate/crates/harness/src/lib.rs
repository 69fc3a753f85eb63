//! Command-line front end for `sqg-core`. Every run or sweep writes a
//! manifest next to plot-ready CSV output.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod sweep;
pub mod verify;

pub use error::{exit, HarnessError, Result};

/// Environment variable naming the output root.
pub const OUT_DIR_ENV: &str = "SQG_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "sqg_out";

/// Output root from `SQG_OUT_DIR`, or `./sqg_out`.
pub fn out_root() -> std::path::PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| DEFAULT_OUT_DIR.into(), Into::into)
}

/// Run directory name: the config file stem.
pub fn run_name(config: &std::path::Path) -> String {
    config.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned())
}
