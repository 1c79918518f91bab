//! Run configuration: a TOML file with sections, overridden by flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use regmmd::detector::{DEFAULT_FOLDS, DEFAULT_L2_GRID};
use regmmd::harness::PrefixTransport;
use regmmd::stats::{DEFAULT_DRAWS, DEFAULT_LEVEL, DEFAULT_SUBSAMPLE};
use regmmd::text_prep::{HARD_LIMIT, SOFT_LIMIT};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const RESOLVED_CONFIG: &str = "resolved_config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub register: String,
    pub seed: u64,
    pub out: PathBuf,
    pub inputs: Inputs,
    pub sampling: Sampling,
    pub text: Text,
    pub generation: Generation,
    pub detector: Detector,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    /// Tagged CoNLL-U files for `extract`.
    pub corpus: Vec<PathBuf>,
    /// Human feature matrix CSV.
    pub human: Option<PathBuf>,
    /// Untagged human records (JSONL) with prompt metadata.
    pub records: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub kernel: Option<PathBuf>,
    pub selection: Option<PathBuf>,
    pub fewshot: Option<PathBuf>,
    /// Model name to feature matrix CSV.
    pub models: BTreeMap<String, PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    pub n: usize,
    #[serde(rename = "B")]
    pub draws: usize,
    pub level: f64,
    /// Subsample sizes for the stability curve.
    pub sizes: Vec<usize>,
    pub candidate_draws: usize,
    pub exclusion_quantile: f64,
    /// Size of the few-shot pool; 0 skips it.
    pub fewshot_n: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            n: DEFAULT_SUBSAMPLE,
            draws: DEFAULT_DRAWS,
            level: DEFAULT_LEVEL,
            sizes: vec![50, 100, 200, 400, 600],
            candidate_draws: 1000,
            exclusion_quantile: 0.05,
            fewshot_n: DEFAULT_SUBSAMPLE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Text {
    /// Source label written into feature matrices.
    pub source: String,
    pub truncate: bool,
    /// Drop documents whose punctuation-to-token ratio is too high.
    pub punctuation_filter: bool,
    pub soft_limit: usize,
    pub hard_limit: usize,
    /// Documents with fewer lexical tokens are dropped before extraction.
    pub min_lexical_tokens: usize,
}

impl Default for Text {
    fn default() -> Self {
        Text {
            source: "human".into(),
            truncate: false,
            punctuation_filter: false,
            soft_limit: SOFT_LIMIT,
            hard_limit: HARD_LIMIT,
            min_lexical_tokens: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Generation {
    pub model: String,
    pub endpoint: String,
    pub variant: String,
    pub shots: usize,
    pub temperature: f64,
    pub top_p: f64,
    pub max_new_tokens: usize,
    pub parallelism: usize,
    pub min_interval_ms: u64,
    pub max_attempts: u32,
    pub prefix_transport: PrefixTransport,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
}

impl Default for Generation {
    fn default() -> Self {
        Generation {
            model: String::new(),
            endpoint: "http://localhost:8000/v1".into(),
            variant: "base".into(),
            shots: 0,
            temperature: 1.0,
            top_p: 1.0,
            max_new_tokens: 1024,
            parallelism: 4,
            min_interval_ms: 0,
            max_attempts: 6,
            prefix_transport: PrefixTransport::Assistant,
            api_key_env: "REGMMD_API_KEY".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Detector {
    pub test_fraction: f64,
    pub folds: usize,
    pub l2_grid: Vec<f64>,
}

impl Default for Detector {
    fn default() -> Self {
        Detector {
            test_fraction: 0.2,
            folds: DEFAULT_FOLDS,
            l2_grid: DEFAULT_L2_GRID.to_vec(),
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            register: String::new(),
            seed: 0,
            out: PathBuf::from("out"),
            inputs: Inputs::default(),
            sampling: Sampling::default(),
            text: Text::default(),
            generation: Generation::default(),
            detector: Detector::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.register.is_empty() {
            return Err(CliError::Config("`register` is required".into()));
        }
        if !(self.sampling.level > 0.0 && self.sampling.level < 100.0) {
            return Err(CliError::Config(format!(
                "`level` must lie strictly between 0 and 100, got {}",
                self.sampling.level
            )));
        }
        if self.text.soft_limit > self.text.hard_limit {
            return Err(CliError::Config(format!(
                "soft limit {} exceeds hard limit {}",
                self.text.soft_limit, self.text.hard_limit
            )));
        }
        Ok(())
    }
}
