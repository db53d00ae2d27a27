//! Seeded experiment campaigns driven by a TOML config.

mod config;
mod report;
mod run;

use std::path::PathBuf;

pub use config::{DimSource, ExperimentConfig, ExperimentKind, Options, Overrides, SpaceConfig};
pub use report::{summary, version, write, Written, SUMMARY_SCHEMA};
pub use run::{prepare, CsvFile, Outcome, Prepared};

use crate::error::Result;

pub const DEFAULT_OUT_DIR: &str = "covset-out";

#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: Outcome,
    pub written: Written,
    pub out_dir: PathBuf,
}

/// Validates, executes and writes one experiment.
pub fn run(config: ExperimentConfig) -> Result<RunReport> {
    let out_dir = config.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let prepared = prepare(config)?;
    let outcome = prepared.execute()?;
    let written = write(&out_dir, &prepared.config, &outcome)?;
    Ok(RunReport { outcome, written, out_dir })
}
