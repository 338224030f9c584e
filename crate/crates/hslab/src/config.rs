//! JSON configuration for `replicate` and the per-command config files.
//!
//! Unknown keys are rejected everywhere so a typo never silently falls back
//! to a default.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use hslab_core::neuron::{RdsMode, RemovalSize, DEFAULT_DEACTIVATION_VALUE, DEFAULT_RDS_EPSILON};
use hslab_core::probe::Optimizer;
use hslab_core::{MiConfig, NeuronSet, ProbeConfig, ScdiConfig, SplitSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Reads a JSON file into `T`; every failure is a configuration error.
pub fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let config_err = |message: String| CliError::Config {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| config_err(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| config_err(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScdiSection {
    pub k_samples: usize,
    pub entanglement_epsilon: f64,
}

impl Default for ScdiSection {
    fn default() -> Self {
        let d = ScdiConfig::default();
        Self {
            k_samples: d.k_samples,
            entanglement_epsilon: d.entanglement_epsilon,
        }
    }
}

impl ScdiSection {
    pub fn with_seed(self, seed: u64) -> ScdiConfig {
        ScdiConfig {
            k_samples: self.k_samples,
            seed,
            entanglement_epsilon: self.entanglement_epsilon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSection {
    pub train_fraction: f64,
    pub balanced: bool,
}

impl Default for SplitSection {
    fn default() -> Self {
        let d = SplitSpec::default();
        Self {
            train_fraction: d.train_fraction,
            balanced: d.balanced,
        }
    }
}

impl SplitSection {
    pub fn with_seed(self, seed: u64) -> SplitSpec {
        SplitSpec {
            train_fraction: self.train_fraction,
            seed,
            balanced: self.balanced,
        }
    }
}

/// Probe settings without a seed; seeds come from the run's global seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSection {
    pub hidden_dim: Option<usize>,
    pub dropout_p: f64,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: Optimizer,
}

impl Default for ProbeSection {
    fn default() -> Self {
        let d = ProbeConfig::default();
        Self {
            hidden_dim: d.hidden_dim,
            dropout_p: d.dropout_p,
            learning_rate: d.learning_rate,
            weight_decay: d.weight_decay,
            epochs: d.epochs,
            batch_size: d.batch_size,
            optimizer: d.optimizer,
        }
    }
}

impl ProbeSection {
    pub fn with_seed(self, seed: u64) -> ProbeConfig {
        ProbeConfig {
            hidden_dim: self.hidden_dim,
            dropout_p: self.dropout_p,
            learning_rate: self.learning_rate,
            weight_decay: self.weight_decay,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed,
            optimizer: self.optimizer,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RdsSection {
    pub epsilon: f64,
    pub mode: RdsMode,
}

impl Default for RdsSection {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_RDS_EPSILON,
            mode: RdsMode::Absolute,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RemovalSection {
    pub size: RemovalSize,
    pub trials: usize,
}

impl Default for RemovalSection {
    fn default() -> Self {
        Self {
            size: RemovalSize::default(),
            trials: 20,
        }
    }
}

fn default_deactivation() -> f32 {
    DEFAULT_DEACTIVATION_VALUE
}

/// Configuration of the full layer-selection and intervention pipeline.
///
/// `layers` and `tau` are required; everything else has a default. Relative
/// layer paths are resolved against the directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub layers: Vec<PathBuf>,
    pub tau: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub scdi: ScdiSection,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub probe: ProbeSection,
    #[serde(default)]
    pub rds: RdsSection,
    #[serde(default)]
    pub removal: RemovalSection,
    /// Extra τ values to sweep on the selected layer; empty skips the sweep.
    #[serde(default)]
    pub tau_grid: Vec<f64>,
    /// Named neuron groups to intervene on alongside the RDS groups.
    #[serde(default)]
    pub groups: BTreeMap<String, NeuronSet>,
    #[serde(default)]
    pub mi: MiConfig,
    #[serde(default = "default_deactivation")]
    pub deactivation_value: f32,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: RunConfig = read_config(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in &mut cfg.layers {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Checks every value before any computation starts.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let fail = |e: hslab_core::Error| e.to_string();
        if self.layers.is_empty() {
            return Err("layers must list at least one file".into());
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(format!("tau must be positive, got {}", self.tau));
        }
        if let Some(t) = self.tau_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(format!("tau_grid values must be positive, got {t}"));
        }
        self.scdi.with_seed(0).validate().map_err(fail)?;
        self.split.with_seed(0).validate().map_err(fail)?;
        self.probe.with_seed(0).validate().map_err(fail)?;
        self.mi.validate().map_err(fail)?;
        if let RemovalSize::Fraction(f) = self.removal.size {
            if !(0.0..=1.0).contains(&f) {
                return Err(format!("removal fraction must lie in [0, 1], got {f}"));
            }
        }
        if !(self.rds.epsilon >= 0.0 && self.rds.epsilon.is_finite()) {
            return Err("rds.epsilon must be non-negative".into());
        }
        if !self.deactivation_value.is_finite() {
            return Err("deactivation_value must be finite".into());
        }
        if let Some((name, _)) = self.groups.iter().find(|(_, g)| g.is_empty()) {
            return Err(format!("group {name:?} is empty"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"layers": ["a.hsds"], "tau": 1.0}"#).unwrap();
        assert_eq!(cfg.removal.trials, 20);
        assert_eq!(cfg.deactivation_value, -1.0);
        assert_eq!(cfg.mi.bins, 20);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn missing_and_unknown_keys_are_named() {
        let err = serde_json::from_str::<RunConfig>(r#"{"layers": []}"#).unwrap_err();
        assert!(err.to_string().contains("tau"), "{err}");
        let err = serde_json::from_str::<RunConfig>(r#"{"layers": [], "tau": 1, "taus": 2}"#)
            .unwrap_err();
        assert!(err.to_string().contains("taus"), "{err}");
        let err =
            serde_json::from_str::<RunConfig>(r#"{"layers": [], "tau": 1, "probe": {"seed": 2}}"#)
                .unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }
}
