//! Report files: `summary.json` plus the per-trial CSVs.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::ExperimentConfig;
use super::run::Outcome;
use crate::error::{Error, Result};

pub const SUMMARY_SCHEMA: &str = "covset-summary v1";

/// Crate version with the `git describe` output of the build tree, when known.
pub fn version() -> String {
    match option_env!("COVSET_GIT_DESCRIBE") {
        Some(d) if !d.is_empty() => format!("{}+{}", env!("CARGO_PKG_VERSION"), d),
        _ => env!("CARGO_PKG_VERSION").to_string(),
    }
}

pub fn summary(config: &ExperimentConfig, outcome: &Outcome) -> Value {
    json!({
        "schema": SUMMARY_SCHEMA,
        "generated_at": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "version": version(),
        "kind": config.kind.name(),
        "seed": config.seed,
        "inputs": config,
        "results": outcome.results,
        "prediction": outcome.prediction,
        "headline": { "name": outcome.headline.0, "value": outcome.headline.1 },
        "check": { "expect": config.options.expect, "passed": outcome.passed },
    })
}

#[derive(Clone, Debug)]
pub struct Written {
    pub summary: Value,
    pub files: Vec<PathBuf>,
}

pub fn write(dir: &Path, config: &ExperimentConfig, outcome: &Outcome) -> Result<Written> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for csv in &outcome.csv {
        let path = dir.join(csv.name);
        std::fs::write(&path, &csv.body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        files.push(path);
    }
    let summary = summary(config, outcome);
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary)?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    files.push(path);
    Ok(Written { summary, files })
}
