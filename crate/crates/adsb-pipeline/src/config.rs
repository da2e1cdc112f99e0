//! Run configuration: plain key=value file with flag overrides.

use std::path::{Path, PathBuf};

use adsb_core::nn::Variant;

use crate::{PipelineError, Result};

/// Which scoring probes the extract stage runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    WeightNorm,
    Ablation,
    Both,
}

impl Method {
    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "weight-norm" | "weight_norm" => Ok(Method::WeightNorm),
            "ablation" => Ok(Method::Ablation),
            "both" => Ok(Method::Both),
            other => Err(PipelineError::Usage(format!(
                "unknown method `{other}` (expected weight-norm, ablation, or both)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::WeightNorm => "weight-norm",
            Method::Ablation => "ablation",
            Method::Both => "both",
        }
    }
}

pub fn parse_variant(s: &str) -> Result<Variant> {
    match s {
        "dense" => Ok(Variant::Dense),
        "lstm" => Ok(Variant::Lstm),
        other => Err(PipelineError::Usage(format!(
            "unknown variant `{other}` (expected dense or lstm)"
        ))),
    }
}

pub fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Dense => "dense",
        Variant::Lstm => "lstm",
    }
}

/// Everything a full pipeline run needs. Defaults match the standalone
/// subcommand defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Directory of snapshot JSON files.
    pub input: PathBuf,
    /// Directory receiving every stage artifact.
    pub workspace: PathBuf,
    pub whitelist: Option<PathBuf>,
    pub country: String,
    pub interesting_field: String,
    pub require_interesting: bool,
    pub sample_seed: u64,
    pub min_present: usize,
    pub split_fraction: f64,
    pub split_seed: u64,
    pub group_by_aircraft: bool,
    pub variant: Variant,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub train_seed: u64,
    pub hidden_dim: usize,
    pub method: Method,
    pub k: usize,
    pub auto_k: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::from("snapshots"),
            workspace: PathBuf::from("workspace"),
            whitelist: None,
            country: String::from("United States"),
            interesting_field: String::from("Interested"),
            require_interesting: true,
            sample_seed: 42,
            min_present: 6,
            split_fraction: 0.8,
            split_seed: 42,
            group_by_aircraft: false,
            variant: Variant::Dense,
            learning_rate: 1e-3,
            epochs: 200,
            batch_size: 32,
            train_seed: 42,
            hidden_dim: 17,
            method: Method::Both,
            k: 10,
            auto_k: false,
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(PipelineError::Usage(format!("{key} must be true or false"))),
    }
}

impl PipelineConfig {
    /// Apply one key=value setting; unknown keys are usage errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| PipelineError::Usage(format!("{key} must be {what}"));
        match key {
            "input" => self.input = PathBuf::from(value),
            "workspace" => self.workspace = PathBuf::from(value),
            "whitelist" => self.whitelist = Some(PathBuf::from(value)),
            "country" => self.country = value.to_string(),
            "interesting_field" => self.interesting_field = value.to_string(),
            "require_interesting" => self.require_interesting = parse_bool(key, value)?,
            "sample_seed" => self.sample_seed = value.parse().map_err(|_| bad("an integer"))?,
            "min_present" => self.min_present = value.parse().map_err(|_| bad("an integer"))?,
            "split_fraction" => {
                let f: f64 = value.parse().map_err(|_| bad("a number"))?;
                if !(f > 0.0 && f < 1.0) {
                    return Err(bad("in (0, 1)"));
                }
                self.split_fraction = f;
            }
            "split_seed" => self.split_seed = value.parse().map_err(|_| bad("an integer"))?,
            "group_by_aircraft" => self.group_by_aircraft = parse_bool(key, value)?,
            "variant" => self.variant = parse_variant(value)?,
            "learning_rate" => {
                self.learning_rate = value.parse().map_err(|_| bad("a number"))?
            }
            "epochs" => self.epochs = value.parse().map_err(|_| bad("an integer"))?,
            "batch_size" => {
                self.batch_size = value.parse().map_err(|_| bad("an integer"))?;
                if self.batch_size == 0 {
                    return Err(bad("a positive integer"));
                }
            }
            "train_seed" => self.train_seed = value.parse().map_err(|_| bad("an integer"))?,
            "hidden_dim" => {
                self.hidden_dim = value.parse().map_err(|_| bad("an integer"))?;
                if self.hidden_dim == 0 {
                    return Err(bad("a positive integer"));
                }
            }
            "method" => self.method = Method::parse(value)?,
            "k" => self.k = value.parse().map_err(|_| bad("an integer"))?,
            "auto_k" => self.auto_k = parse_bool(key, value)?,
            _ => {
                return Err(PipelineError::Usage(format!("unknown config key `{key}`")));
            }
        }
        Ok(())
    }

    /// Load from a key=value file: `#` comments, blank lines ignored.
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let mut config = PipelineConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                PipelineError::Usage(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    lineno + 1
                ))
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Config snapshot for manifests: sorted (key, value) pairs.
    pub fn snapshot(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("input".into(), self.input.display().to_string()),
            ("workspace".into(), self.workspace.display().to_string()),
            ("country".into(), self.country.clone()),
            ("interesting_field".into(), self.interesting_field.clone()),
            (
                "require_interesting".into(),
                self.require_interesting.to_string(),
            ),
            ("sample_seed".into(), self.sample_seed.to_string()),
            ("min_present".into(), self.min_present.to_string()),
            ("split_fraction".into(), format!("{}", self.split_fraction)),
            ("split_seed".into(), self.split_seed.to_string()),
            (
                "group_by_aircraft".into(),
                self.group_by_aircraft.to_string(),
            ),
            ("variant".into(), variant_name(self.variant).to_string()),
            ("learning_rate".into(), format!("{}", self.learning_rate)),
            ("epochs".into(), self.epochs.to_string()),
            ("batch_size".into(), self.batch_size.to_string()),
            ("train_seed".into(), self.train_seed.to_string()),
            ("hidden_dim".into(), self.hidden_dim.to_string()),
            ("method".into(), self.method.as_str().to_string()),
            ("k".into(), self.k.to_string()),
            ("auto_k".into(), self.auto_k.to_string()),
        ];
        if let Some(w) = &self.whitelist {
            kv.push(("whitelist".into(), w.display().to_string()));
        }
        kv.sort();
        kv
    }
}
