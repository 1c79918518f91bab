use std::path::PathBuf;

use regmmd::corpus::IngestError;
use regmmd::detector::DetectorError;
use regmmd::dimensions::StandardizeError;
use regmmd::features::FeatureError;
use regmmd::harness::{GenerationError, PromptError};
use regmmd::matrix::MatrixError;
use regmmd::sampler::SamplerError;
use regmmd::stats::StatsError;
use regmmd::text_prep::PrepError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error("missing input: {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Prep(#[from] PrepError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Standardize(#[from] StandardizeError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Generation(#[from] GenerationError),
}

impl CliError {
    pub fn input(path: &std::path::Path, message: impl ToString) -> Self {
        CliError::Input {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }
}
