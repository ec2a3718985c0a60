use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use satgraph::data::{SplitSpec, SynthConfig};
use satgraph::{ModelConfig, TrainConfig};

use crate::error::CliError;

/// Architecture variants compared in ablation runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Ablation {
    /// Convolutions plus learned attention.
    #[default]
    Full,
    /// Attention layer kept, coefficients fixed to uniform.
    NoAttention,
    /// Convolutions only.
    GcnOnly,
    /// Learned attention directly on the embeddings, no convolutions.
    AttentionOnly,
}

impl Ablation {
    pub fn name(self) -> &'static str {
        match self {
            Ablation::Full => "full",
            Ablation::NoAttention => "no-attention",
            Ablation::GcnOnly => "gcn-only",
            Ablation::AttentionOnly => "attention-only",
        }
    }

    /// Sets the attention flags; `AttentionOnly` also drops the convolutions.
    pub fn apply(self, model: &mut ModelConfig) {
        let (layer, enabled) = match self {
            Ablation::Full | Ablation::AttentionOnly => (true, true),
            Ablation::NoAttention => (true, false),
            Ablation::GcnOnly => (false, false),
        };
        model.attention_layer = layer;
        model.attention_enabled = enabled;
        if self == Ablation::AttentionOnly {
            model.hidden_dims.clear();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub rates: Vec<f64>,
    /// Label-noise seeds; every point shares the run's training seed.
    pub seeds: Vec<u64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            rates: vec![0.0, 0.1, 0.2, 0.3, 0.4],
            seeds: vec![1, 2, 3, 4, 5],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AblateConfig {
    pub variants: Vec<Ablation>,
    /// Training seeds; each variant is trained once per seed.
    pub seeds: Vec<u64>,
}

impl Default for AblateConfig {
    fn default() -> Self {
        Self {
            variants: vec![Ablation::Full, Ablation::NoAttention, Ablation::GcnOnly],
            seeds: vec![1, 2, 3, 4, 5],
        }
    }
}

/// Everything a run needs. Reports embed the resolved value, so a report file
/// is itself a valid `--config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Master seed; becomes the training seed (initialization and shuffling).
    pub seed: u64,
    pub ablation: Ablation,
    /// CSV input. When absent, data comes from the `[synth]` generator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub split: SplitSpec,
    pub synth: SynthConfig,
    pub sweep: SweepConfig,
    pub ablate: AblateConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            ablation: Ablation::Full,
            dataset: None,
            schema: None,
            out_dir: PathBuf::from("out"),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            split: SplitSpec::default(),
            synth: SynthConfig::default(),
            sweep: SweepConfig::default(),
            ablate: AblateConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parses a config file, or the `[config]` table of a report file.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        let inner = match table.get("config") {
            Some(toml::Value::Table(t)) => t.clone(),
            _ => table,
        };
        inner.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Propagates the master seed and ablation into the component configs,
    /// then validates everything.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        self.train.seed = self.seed;
        self.ablation.apply(&mut self.model);
        let config = |e: satgraph::Error| CliError::Config(e.to_string());
        self.model.validate().map_err(config)?;
        self.train.validate().map_err(config)?;
        self.split.validate().map_err(config)?;
        if self.dataset.is_none() {
            self.synth.validate().map_err(config)?;
        } else if self.schema.is_none() {
            return Err(CliError::Config("`dataset` requires `schema`".into()));
        }
        if self.sweep.seeds.is_empty() || self.ablate.seeds.is_empty() {
            return Err(CliError::Config("seed lists must not be empty".into()));
        }
        if let Some(r) = self.sweep.rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(CliError::Config(format!("noise rate {r} outside [0, 1]")));
        }
        Ok(self)
    }

    pub fn to_toml_string(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// `<first 12 hex digits of SHA-256(config)>-s<seed>`.
    pub fn run_id(&self) -> Result<String, CliError> {
        Ok(format!("{}-s{}", short_hash(self.to_toml_string()?.as_bytes()), self.seed))
    }
}

pub fn short_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .take(6)
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = RunConfig::default().resolve().unwrap();
        let back = RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn report_wrapper_is_accepted() {
        let cfg = RunConfig::default().resolve().unwrap();
        let text = format!("command = \"train\"\n\n[config]\n{}", cfg.to_toml_string().unwrap())
            .replace("\n[model]", "\n[config.model]")
            .replace("\n[train]", "\n[config.train]")
            .replace("\n[split]", "\n[config.split]")
            .replace("\n[synth]", "\n[config.synth]")
            .replace("\n[sweep]", "\n[config.sweep]")
            .replace("\n[ablate]", "\n[config.ablate]");
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn ablations_set_flags() {
        let mut cfg = RunConfig {
            ablation: Ablation::NoAttention,
            ..RunConfig::default()
        };
        cfg = cfg.resolve().unwrap();
        assert!(cfg.model.attention_layer && !cfg.model.attention_enabled);
        let cfg = RunConfig {
            ablation: Ablation::GcnOnly,
            ..RunConfig::default()
        }
        .resolve()
        .unwrap();
        assert!(!cfg.model.attention_layer);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        assert!(matches!(RunConfig::from_toml_str("sed = 1"), Err(CliError::Config(_))));
        let bad = RunConfig {
            sweep: SweepConfig {
                rates: vec![1.5],
                seeds: vec![1],
            },
            ..RunConfig::default()
        };
        assert!(matches!(bad.resolve(), Err(CliError::Config(_))));
    }

    #[test]
    fn run_id_tracks_config() {
        let a = RunConfig::default().resolve().unwrap();
        let b = RunConfig {
            seed: 7,
            ..RunConfig::default()
        }
        .resolve()
        .unwrap();
        assert_ne!(a.run_id().unwrap(), b.run_id().unwrap());
        assert!(b.run_id().unwrap().ends_with("-s7"));
    }
}
