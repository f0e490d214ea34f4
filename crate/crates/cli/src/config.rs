//! JSON configuration for the `simulate` subcommand.

use std::fs;
use std::path::Path;

use cadkit_core::gaussian::{BlockRole, FeatureBlock, GaussianSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("block `{block}` has unknown role `{role}` (expected robust or spurious)")]
    UnknownRole { block: String, role: String },
    #[error(transparent)]
    Spec(#[from] cadkit_core::gaussian::GaussianError),
    #[error("sweep block `{0}` must be a robust block with a nonzero mean")]
    BadSweepBlock(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockConfig {
    pub name: String,
    pub role: String,
    pub mean: Vec<f64>,
    pub sigma: f64,
}

/// Sweeps the norm of one robust block's mean across `norms`, comparing the
/// incomplete-edit error against the unaugmented error at each point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub block: String,
    pub norms: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub blocks: Vec<BlockConfig>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Robust blocks perturbed by the counterfactual edit; defaults to every
    /// robust block (minus the sweep block when a sweep is configured).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edit_blocks: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_samples() -> usize {
    200_000
}

fn default_seed() -> u64 {
    42
}

impl SimulateConfig {
    /// The bundled default: one unit-variance robust block at mean 1 and one
    /// spurious block at mean 0.5.
    pub fn bundled_default() -> Self {
        Self {
            blocks: vec![
                BlockConfig {
                    name: "r".into(),
                    role: "robust".into(),
                    mean: vec![1.0],
                    sigma: 1.0,
                },
                BlockConfig {
                    name: "s".into(),
                    role: "spurious".into(),
                    mean: vec![0.5],
                    sigma: 1.0,
                },
            ],
            samples: default_samples(),
            seed: default_seed(),
            edit_blocks: None,
            sweep: None,
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let display = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: display.clone(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|err| ConfigError::Parse {
            path: display,
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        })
    }

    pub fn to_spec(&self) -> Result<GaussianSpec, ConfigError> {
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let role = BlockRole::parse(&b.role).ok_or_else(|| ConfigError::UnknownRole {
                block: b.name.clone(),
                role: b.role.clone(),
            })?;
            blocks.push(FeatureBlock::new(&b.name, role, b.mean.clone(), b.sigma));
        }
        Ok(GaussianSpec::new(blocks)?)
    }
}
