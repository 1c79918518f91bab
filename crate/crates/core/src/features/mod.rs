//! Biber lexico-grammatical features.
//!
//! Rate features are counts per 1,000 lexical tokens. The type/token ratio
//! uses the first 400 lexical tokens; mean word length is in characters.

pub mod inventory;
pub mod lexicon;
mod rules;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, TaggedDocument};
use crate::dimensions::StandardizationStats;
use crate::matrix::{FeatureMatrix, FeatureVector};
use crate::par;
use crate::stats::wasserstein_1d;

pub use inventory::{FeatureDescriptor, FeatureInventory, Unit, FEATURES, FEATURE_COUNT, INVENTORY_VERSION};
pub use rules::{raw_counts, RawCounts};

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("empty document `{0}`")]
    EmptyDocument(String),
    #[error("matrices do not share an inventory: `{0}` vs `{1}`")]
    InventoryMismatch(String, String),
    #[error("matrix width {found} does not match the inventory ({expected})")]
    Width { expected: usize, found: usize },
    #[error("feature report needs non-empty matrices")]
    EmptyMatrix,
}

pub fn extract_features(
    doc: &TaggedDocument,
    inventory: &FeatureInventory,
) -> Result<FeatureVector, FeatureError> {
    let raw = raw_counts(doc);
    if raw.lexical_tokens == 0 {
        return Err(FeatureError::EmptyDocument(doc.doc_id.clone()));
    }
    let tokens = raw.lexical_tokens as f64;
    let values = inventory
        .features
        .iter()
        .zip(raw.counts.iter())
        .map(|(f, &count)| match f.unit {
            Unit::RatePer1000 => count * 1000.0 / tokens,
            Unit::Ratio | Unit::MeanCharacters => count,
        })
        .collect();
    Ok(FeatureVector {
        doc_id: doc.doc_id.clone(),
        values,
    })
}

/// One row per document, in corpus order.
pub fn extract_matrix(
    corpus: &Corpus,
    inventory: &FeatureInventory,
) -> Result<FeatureMatrix, FeatureError> {
    let source = corpus
        .documents
        .first()
        .map(|d| d.source.label().to_string())
        .unwrap_or_else(|| "human".into());
    extract_documents(&corpus.documents, &corpus.register, &source, inventory)
}

pub fn extract_documents(
    documents: &[TaggedDocument],
    register: &str,
    source: &str,
    inventory: &FeatureInventory,
) -> Result<FeatureMatrix, FeatureError> {
    let rows = par::map(documents, |d| extract_features(d, inventory));
    let rows: Result<Vec<_>, _> = rows.into_iter().collect();
    Ok(FeatureMatrix::from_vectors(
        register,
        source,
        inventory.version,
        inventory.len(),
        rows?,
    )
    .expect("extracted rows match the inventory width"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureDiff {
    pub feature_id: String,
    pub mean_a: f64,
    pub mean_b: f64,
    /// (mean_b - mean_a) in units of the reference standard deviation;
    /// `None` when that deviation is zero.
    pub sd_difference: Option<f64>,
    /// W1 between the standardized marginals.
    pub wasserstein: f64,
    pub undefined: bool,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Per-feature comparison of `b` against the reference `a`, in units of the
/// full-human standard deviations held by `stats`.
pub fn feature_diff_report(
    a: &FeatureMatrix,
    b: &FeatureMatrix,
    stats: &StandardizationStats,
    inventory: &FeatureInventory,
) -> Result<Vec<FeatureDiff>, FeatureError> {
    if a.inventory_version != b.inventory_version {
        return Err(FeatureError::InventoryMismatch(
            a.inventory_version.clone(),
            b.inventory_version.clone(),
        ));
    }
    if a.ncols() != inventory.len() || b.ncols() != inventory.len() {
        return Err(FeatureError::Width {
            expected: inventory.len(),
            found: if a.ncols() != inventory.len() { a.ncols() } else { b.ncols() },
        });
    }
    if a.is_empty() || b.is_empty() {
        return Err(FeatureError::EmptyMatrix);
    }
    let report = inventory
        .features
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let col_a = a.column(j);
            let col_b = b.column(j);
            let (mean_a, mean_b) = (mean(&col_a), mean(&col_b));
            let sd = stats.sds[j];
            let undefined = sd == 0.0;
            let z = |xs: &[f64]| -> Vec<f64> {
                xs.iter()
                    .map(|x| if undefined { 0.0 } else { (x - stats.means[j]) / sd })
                    .collect()
            };
            let wasserstein = wasserstein_1d(&z(&col_a), &z(&col_b)).expect("non-empty columns");
            FeatureDiff {
                feature_id: f.id.to_string(),
                mean_a,
                mean_b,
                sd_difference: (!undefined).then(|| (mean_b - mean_a) / sd),
                wasserstein,
                undefined,
            }
        })
        .collect();
    Ok(report)
}
