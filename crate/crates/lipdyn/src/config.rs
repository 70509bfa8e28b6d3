//! TOML configuration covering every tunable, with defaults for anything left out.

use std::path::Path;

use lipdyn_core::eval::EvalConfig;
use lipdyn_core::pipeline::PipelineConfig;
use lipdyn_core::verifier::TrainConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub subjects: usize,
    pub windows: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            subjects: 10,
            windows: 20,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub pipeline: PipelineConfig,
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub synth: SynthConfig,
}

impl Config {
    pub fn parse(text: &str, path: Option<&Path>) -> Result<Config> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config {
            path: path.map(Path::to_path_buf),
            message: e.message().to_string(),
        })?;
        cfg.validate().map_err(|e| match (e, path) {
            (CliError::Config { message, .. }, Some(p)) => CliError::Config {
                path: Some(p.to_path_buf()),
                message,
            },
            (e, _) => e,
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Config::parse(&text, Some(path))
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |r: lipdyn_core::Result<()>| {
            r.map_err(|e| CliError::Config {
                path: None,
                message: e.to_string(),
            })
        };
        wrap(self.pipeline.validate())?;
        wrap(self.train.validate())?;
        wrap(self.eval.validate())?;
        if self.synth.subjects < 2 || self.synth.windows == 0 {
            return Err(CliError::Config {
                path: None,
                message: "synth.subjects must be at least 2 and synth.windows positive".into(),
            });
        }
        if [self.train.seed, self.eval.seed, self.synth.seed].iter().any(|&s| s > i64::MAX as u64) {
            return Err(CliError::Config {
                path: None,
                message: "seeds must fit in a signed 64-bit integer".into(),
            });
        }
        Ok(())
    }

    /// Sets every seed.
    pub fn with_seed(mut self, seed: u64) -> Config {
        self.train.seed = seed;
        self.eval.seed = seed;
        self.synth.seed = seed;
        self
    }

    pub fn dump(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }
}
