//! Representative subsampling by random search over candidate draws.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::index;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TaggedDocument;
use crate::dimensions::{DimensionScores, DIMENSIONS};
use crate::par;
use crate::stats::{stream_rng, wasserstein_sorted};
use crate::text_prep::count_words;

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("need {needed} eligible documents, have {available}")]
    TooFewEligible { needed: usize, available: usize },
    #[error("exclusion quantile must lie in [0, 1), got {0}")]
    Quantile(f64),
    #[error("at least one candidate draw is required")]
    NoDraws,
    #[error("subsample size must be positive")]
    EmptyTarget,
    #[error("eligible id `{0}` has no dimension scores")]
    UnknownId(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleSpec {
    pub n: usize,
    pub candidate_draws: usize,
    pub exclusion_quantile: f64,
    pub seed: u64,
}

impl SubsampleSpec {
    pub fn new(n: usize, seed: u64) -> Self {
        SubsampleSpec {
            n,
            candidate_draws: 1000,
            exclusion_quantile: 0.05,
            seed,
        }
    }

    fn validate(&self) -> Result<(), SamplerError> {
        if !(0.0..1.0).contains(&self.exclusion_quantile) {
            return Err(SamplerError::Quantile(self.exclusion_quantile));
        }
        if self.candidate_draws == 0 {
            return Err(SamplerError::NoDraws);
        }
        if self.n == 0 {
            return Err(SamplerError::EmptyTarget);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleResult {
    pub selected_ids: Vec<String>,
    pub aggregate_w1: f64,
    pub excluded_ids: Vec<String>,
    pub draw_index: usize,
    /// Aggregate W1 of every candidate, in draw order.
    #[serde(skip)]
    pub candidate_w1: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionManifest<'a> {
    pub selected_ids: &'a [String],
    pub excluded_ids: &'a [String],
    pub aggregate_w1: f64,
    pub seed: u64,
    pub spec: &'a SubsampleSpec,
}

impl SubsampleResult {
    pub fn manifest<'a>(&'a self, spec: &'a SubsampleSpec) -> SelectionManifest<'a> {
        SelectionManifest {
            selected_ids: &self.selected_ids,
            excluded_ids: &self.excluded_ids,
            aggregate_w1: self.aggregate_w1,
            seed: spec.seed,
            spec,
        }
    }
}

/// Word count of the concatenated metadata values.
pub fn metadata_length(metadata: &BTreeMap<String, String>) -> usize {
    let joined: Vec<&str> = metadata.values().map(String::as_str).collect();
    count_words(&joined.join(" "))
}

pub fn metadata_lengths(docs: &[TaggedDocument]) -> Vec<(String, usize)> {
    docs.iter()
        .map(|d| (d.doc_id.clone(), metadata_length(&d.metadata)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Eligibility {
    pub eligible: Vec<String>,
    pub excluded: Vec<String>,
}

/// Drops the `floor(quantile * N)` documents with the longest metadata.
/// Ties at the cutoff go to the lexicographically smaller doc id.
pub fn exclusion_filter(lengths: &[(String, usize)], quantile: f64) -> Result<Eligibility, SamplerError> {
    if !(0.0..1.0).contains(&quantile) {
        return Err(SamplerError::Quantile(quantile));
    }
    let k = (quantile * lengths.len() as f64).floor() as usize;
    let mut order: Vec<&(String, usize)> = lengths.iter().collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let excluded: HashSet<&str> = order[..k].iter().map(|(id, _)| id.as_str()).collect();
    let mut out = Eligibility::default();
    for (id, _) in lengths {
        if excluded.contains(id.as_str()) {
            out.excluded.push(id.clone());
        } else {
            out.eligible.push(id.clone());
        }
    }
    Ok(out)
}

/// Draws `candidate_draws` uniform size-`n` subsets of `eligible` and keeps
/// the one whose six dimension marginals are closest to the full corpus
/// in summed W1. Ties go to the earliest draw.
pub fn representative_subsample(
    full_dims: &[DimensionScores],
    eligible: &[String],
    spec: &SubsampleSpec,
) -> Result<SubsampleResult, SamplerError> {
    spec.validate()?;
    let mut pool: Vec<&String> = eligible.iter().collect();
    pool.sort();
    pool.dedup();
    if pool.len() < spec.n {
        return Err(SamplerError::TooFewEligible {
            needed: spec.n,
            available: pool.len(),
        });
    }
    let by_id: HashMap<&str, &DimensionScores> =
        full_dims.iter().map(|s| (s.doc_id.as_str(), s)).collect();
    let pool_scores: Vec<&DimensionScores> = pool
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .copied()
                .ok_or_else(|| SamplerError::UnknownId(id.to_string()))
        })
        .collect::<Result<_, _>>()?;
    let full_sorted: Vec<Vec<f64>> = (0..DIMENSIONS)
        .map(|d| {
            let mut col: Vec<f64> = full_dims.iter().map(|s| s.scores[d]).collect();
            col.sort_by(f64::total_cmp);
            col
        })
        .collect();

    let draw = |i: usize| -> Vec<usize> {
        let mut rng = stream_rng(spec.seed, i as u64);
        let mut picked = index::sample(&mut rng, pool.len(), spec.n).into_vec();
        picked.sort_unstable();
        picked
    };
    let candidate_w1 = par::map_range(spec.candidate_draws, |i| {
        let picked = draw(i);
        let mut col = vec![0.0; spec.n];
        (0..DIMENSIONS)
            .map(|d| {
                for (c, &p) in col.iter_mut().zip(&picked) {
                    *c = pool_scores[p].scores[d];
                }
                col.sort_by(f64::total_cmp);
                wasserstein_sorted(&full_sorted[d], &col)
            })
            .sum::<f64>()
    });
    let (draw_index, aggregate_w1) = candidate_w1
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, w)| if w < best.1 { (i, w) } else { best });
    let excluded_ids = {
        let eligible: HashSet<&str> = pool.iter().map(|s| s.as_str()).collect();
        full_dims
            .iter()
            .filter(|s| !eligible.contains(s.doc_id.as_str()))
            .map(|s| s.doc_id.clone())
            .collect()
    };
    Ok(SubsampleResult {
        selected_ids: draw(draw_index).into_iter().map(|p| pool[p].clone()).collect(),
        aggregate_w1,
        excluded_ids,
        draw_index,
        candidate_w1,
    })
}

/// The same search over `eligible` minus the evaluation selection, so the
/// demonstration pool never overlaps the evaluation set.
pub fn fewshot_pool(
    full_dims: &[DimensionScores],
    eligible: &[String],
    eval_selected: &[String],
    spec: &SubsampleSpec,
) -> Result<SubsampleResult, SamplerError> {
    let taken: HashSet<&str> = eval_selected.iter().map(String::as_str).collect();
    let remainder: Vec<String> = eligible
        .iter()
        .filter(|id| !taken.contains(id.as_str()))
        .cloned()
        .collect();
    representative_subsample(full_dims, &remainder, spec)
}
