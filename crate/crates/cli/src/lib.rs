//! Command-line orchestration of the extraction, baseline, subsampling,
//! generation, evaluation and diagnostics stages.

pub mod backend;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "regmmd", version, about = "Register-aware human-likeness evaluation with Biber features and MMD")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct Common {
    #[arg(long)]
    pub register: Option<String>,
    /// Subsample size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Resampling draws.
    #[arg(long = "B")]
    pub draws: Option<usize>,
    /// Confidence level in percent.
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Kernel configuration JSON to reuse instead of fitting.
    #[arg(long)]
    pub kernel: Option<PathBuf>,
    /// Standardization statistics JSON to reuse instead of fitting.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct Comparison {
    /// Human feature matrix CSV.
    #[arg(long)]
    pub human: Option<PathBuf>,
    /// Selection manifest naming the human evaluation subsample.
    #[arg(long)]
    pub selection: Option<PathBuf>,
    /// Model feature matrix as NAME=PATH; repeatable.
    #[arg(long = "model", value_parser = parse_named)]
    pub models: Vec<(String, PathBuf)>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract feature matrices from tagged CoNLL-U corpora.
    Extract {
        #[command(flatten)]
        common: Common,
        /// CoNLL-U input; repeatable.
        #[arg(long = "input")]
        inputs: Vec<PathBuf>,
        /// Source label for the matrix, e.g. `human` or a model name.
        #[arg(long)]
        source: Option<String>,
        /// Apply the soft/hard token limit before extraction.
        #[arg(long)]
        truncate: bool,
    },
    /// Fit the human frame and kernel, and sweep human-human intervals.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        human: Option<PathBuf>,
        /// Comma-separated subsample sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
    /// Select the representative evaluation subsample and few-shot pool.
    Subsample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        human: Option<PathBuf>,
        /// Human records JSONL, for the metadata-length exclusion.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Few-shot pool size; 0 skips the pool.
        #[arg(long)]
        fewshot_n: Option<usize>,
    },
    /// Generate a parallel model corpus through a chat-completions endpoint.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        selection: Option<PathBuf>,
        #[arg(long)]
        fewshot: Option<PathBuf>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long)]
        variant: Option<String>,
    },
    /// Rank model corpora by squared MMD to the human sample.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        comparison: Comparison,
    },
    /// Dimension, marginal, variance, cross-model and detector reports.
    Diagnostics {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        comparison: Comparison,
    },
    /// Train and evaluate the human-versus-model classifier.
    Detector {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        comparison: Comparison,
    },
}

fn parse_named(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name.to_string(), PathBuf::from(path))),
        _ => Err(format!("expected NAME=PATH, got `{s}`")),
    }
}

fn apply_common(cfg: &mut RunConfig, c: Common) {
    if let Some(v) = c.register {
        cfg.register = v;
    }
    if let Some(v) = c.n {
        cfg.sampling.n = v;
    }
    if let Some(v) = c.draws {
        cfg.sampling.draws = v;
    }
    if let Some(v) = c.level {
        cfg.sampling.level = v;
    }
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    if c.kernel.is_some() {
        cfg.inputs.kernel = c.kernel;
    }
    if c.stats.is_some() {
        cfg.inputs.stats = c.stats;
    }
    if let Some(v) = c.out {
        cfg.out = v;
    }
}

fn apply_comparison(cfg: &mut RunConfig, c: Comparison) {
    if c.human.is_some() {
        cfg.inputs.human = c.human;
    }
    if c.selection.is_some() {
        cfg.inputs.selection = c.selection;
    }
    cfg.inputs.models.extend(c.models);
}

/// Merges the configuration file and flags, validates, and runs the
/// command. Returns the files written.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let set = |slot: &mut Option<PathBuf>, v: Option<PathBuf>| {
        if v.is_some() {
            *slot = v;
        }
    };
    let stage: fn(&RunConfig) -> Result<Vec<PathBuf>, CliError> = match cli.command {
        Command::Extract {
            common,
            inputs,
            source,
            truncate,
        } => {
            apply_common(&mut cfg, common);
            if !inputs.is_empty() {
                cfg.inputs.corpus = inputs;
            }
            if let Some(s) = source {
                cfg.text.source = s;
            }
            cfg.text.truncate |= truncate;
            commands::extract
        }
        Command::Baseline { common, human, sizes } => {
            apply_common(&mut cfg, common);
            set(&mut cfg.inputs.human, human);
            if !sizes.is_empty() {
                cfg.sampling.sizes = sizes;
            }
            commands::baseline
        }
        Command::Subsample {
            common,
            human,
            records,
            fewshot_n,
        } => {
            apply_common(&mut cfg, common);
            set(&mut cfg.inputs.human, human);
            set(&mut cfg.inputs.records, records);
            if let Some(v) = fewshot_n {
                cfg.sampling.fewshot_n = v;
            }
            commands::subsample
        }
        Command::Generate {
            common,
            records,
            selection,
            fewshot,
            model,
            endpoint,
            shots,
            variant,
        } => {
            apply_common(&mut cfg, common);
            set(&mut cfg.inputs.records, records);
            set(&mut cfg.inputs.selection, selection);
            set(&mut cfg.inputs.fewshot, fewshot);
            let g = &mut cfg.generation;
            if let Some(v) = model {
                g.model = v;
            }
            if let Some(v) = endpoint {
                g.endpoint = v;
            }
            if let Some(v) = shots {
                g.shots = v;
            }
            if let Some(v) = variant {
                g.variant = v;
            }
            commands::generate
        }
        Command::Evaluate { common, comparison } => {
            apply_common(&mut cfg, common);
            apply_comparison(&mut cfg, comparison);
            commands::evaluate
        }
        Command::Diagnostics { common, comparison } => {
            apply_common(&mut cfg, common);
            apply_comparison(&mut cfg, comparison);
            commands::diagnostics
        }
        Command::Detector { common, comparison } => {
            apply_common(&mut cfg, common);
            apply_comparison(&mut cfg, comparison);
            commands::detector
        }
    };
    cfg.validate()?;
    stage(&cfg)
}
