//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limsup::{Dependence, ProbabilityField, Retention};
use crate::process::SystemPreset;
use crate::sequences::SequenceSpec;
use crate::space::SpaceSpec;
use crate::target::TargetSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    BtIndex,
    NestingCheck,
    CoverSim,
    DimEst,
    HitProb,
    Percolate,
    LimsupHit,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::BtIndex => "bt-index",
            ExperimentKind::NestingCheck => "nesting-check",
            ExperimentKind::CoverSim => "cover-sim",
            ExperimentKind::DimEst => "dim-est",
            ExperimentKind::HitProb => "hit-prob",
            ExperimentKind::Percolate => "percolate",
            ExperimentKind::LimsupHit => "limsup-hit",
        }
    }
}

/// Either a named preset or an explicit base and alphabet.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<SystemPreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_cap: Option<u32>,
}

impl SpaceConfig {
    pub fn resolve(&self) -> Result<SpaceSpec> {
        let mut spec = match (&self.preset, self.base, &self.alphabet) {
            (Some(p), None, None) => p.spec(),
            (None, Some(base), Some(alphabet)) => SpaceSpec { base, alphabet: alphabet.clone(), depth_cap: None },
            (None, Some(base), None) => SpaceSpec { base, alphabet: (0..base as u8).collect(), depth_cap: None },
            (Some(_), _, _) => return Err(Error::config("space", "give either `preset` or `base`/`alphabet`")),
            (None, None, _) => return Err(Error::config("space.base", "missing")),
        };
        spec.depth_cap = self.depth_cap;
        Ok(spec)
    }
}

/// Which counts `dim-est` regresses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimSource {
    /// Cubes of G met by block k of a covering realization.
    #[default]
    Cover,
    /// Retained cubes of G in a limsup random fractal.
    Limsup,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// First block of the hitting window; defaults to the last third.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_min: Option<u32>,
    #[serde(default = "default_m0")]
    pub m0: u32,
    /// Regression levels for `dim-est`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(u32, u32)>,
    /// Trailing window for `bt-index`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bt_window: Option<u32>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Overrides the index used for predictions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub source: DimSource,
    #[serde(default = "default_copies")]
    pub copies: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retention: Option<Retention>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<ProbabilityField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dependence: Option<Dependence>,
    #[serde(default)]
    pub doubled: bool,
    /// Pass range for the headline value; failing it exits with status 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<(f64, f64)>,
}

fn default_m0() -> u32 {
    4
}

fn default_tol() -> f64 {
    0.1
}

fn default_copies() -> u32 {
    1
}

fn default_trials() -> usize {
    100
}

impl Default for Options {
    fn default() -> Self {
        Options {
            k_min: None,
            m0: default_m0(),
            window: None,
            bt_window: None,
            tol: default_tol(),
            alpha: None,
            source: DimSource::default(),
            copies: default_copies(),
            retention: None,
            field: None,
            dependence: None,
            doubled: false,
            expect: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Block count K, tree depth or nesting depth, depending on the kind.
    pub depth: u32,
    /// Worker threads; defaults to the available cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub space: SpaceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
    #[serde(default)]
    pub options: Options,
}

/// Command-line or environment values that replace config entries.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub depth: Option<u32>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "config".to_string() } else { path }, e.into_inner().message().trim())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(trials) = o.trials {
            self.trials = trials;
        }
        if let Some(depth) = o.depth {
            self.depth = depth;
        }
        if let Some(jobs) = o.jobs {
            self.jobs = Some(jobs);
        }
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
