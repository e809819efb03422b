use std::path::Path;

use serde::{Deserialize, Serialize};
use urquhart_core::evaluation::{ExperimentConfig, MergeConfig};
use urquhart_core::{DescriptorConfig, MatchConfig, RansacConfig, SimConfig};

use crate::error::CliError;

/// Sub-map merging parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MergeSection {
    pub eps: f64,
    pub min_pts: usize,
    /// Consecutive poses per simulated sub-map.
    pub window: usize,
    /// Poses between the first poses of consecutive sub-maps.
    pub stride: usize,
    /// Simulated laps used when sub-maps come from the simulator.
    pub laps: usize,
}

impl Default for MergeSection {
    fn default() -> Self {
        let base = MergeConfig::default();
        Self {
            eps: base.eps,
            min_pts: base.min_pts,
            window: 6,
            stride: 3,
            laps: 1,
        }
    }
}

impl MergeSection {
    pub fn merge_config(&self) -> MergeConfig {
        MergeConfig {
            eps: self.eps,
            min_pts: self.min_pts,
        }
    }
}

/// Everything a command needs. Omitted keys take their defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// When set, replaces the simulator, matcher and RANSAC seeds.
    pub seed: Option<u64>,
    pub sim: SimConfig,
    pub descriptor: DescriptorConfig,
    pub matching: MatchConfig,
    pub ransac: RansacConfig,
    pub experiment: ExperimentConfig,
    pub merge: MergeSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads the `config` object of a run manifest.
    pub fn from_manifest(text: &str) -> Result<Self, CliError> {
        #[derive(Deserialize)]
        struct ManifestConfig {
            config: RunConfig,
        }
        serde_json::from_str::<ManifestConfig>(text)
            .map(|m| m.config)
            .map_err(|e| CliError::Config(format!("{e} (line {}, column {})", e.line(), e.column())))
    }

    /// Reads a TOML file, or a `.json` run manifest; returns the defaults
    /// when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(p) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
        let parsed = if p.extension().is_some_and(|e| e == "json") {
            Self::from_manifest(&text)
        } else {
            Self::parse(&text)
        };
        parsed.map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", p.display())),
            other => other,
        })
    }

    /// Applies the global seed and checks every section.
    pub fn resolve(mut self, seed_override: Option<u64>) -> Result<Self, CliError> {
        if seed_override.is_some() {
            self.seed = seed_override;
        }
        if let Some(s) = self.seed {
            self.sim.seed = s;
            self.matching.seed = s;
            self.ransac.seed = s;
        }
        self.sim.validate()?;
        self.descriptor.validate()?;
        self.matching.validate()?;
        self.ransac.validate()?;
        self.experiment.validate()?;
        if self.merge.window == 0 || self.merge.stride == 0 || self.merge.laps == 0 || !(self.merge.eps > 0.0) {
            return Err(CliError::Config("merge window, stride, laps and eps must be positive".into()));
        }
        Ok(self)
    }
}
