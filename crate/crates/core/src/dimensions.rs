//! Full-human standardization and dimension scores.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureInventory;
use crate::matrix::{FeatureMatrix, Frame};
use crate::par;

pub const DIMENSIONS: usize = 6;

#[derive(Debug, Error, PartialEq)]
pub enum StandardizeError {
    #[error("cannot fit standardization statistics on an empty matrix")]
    Empty,
    #[error("standard deviation is undefined for a single row")]
    SingleRow,
    #[error("inventory mismatch: matrix `{matrix}`, statistics `{stats}`")]
    InventoryMismatch { matrix: String, stats: String },
    #[error("matrix width {found} does not match statistics width {expected}")]
    Width { expected: usize, found: usize },
    #[error("matrix is not standardized")]
    NotStandardized,
    #[error("unknown feature `{0}` in loadings table")]
    UnknownFeature(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub inventory_version: String,
    pub register: String,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    pub fitted_on: usize,
}

impl StandardizationStats {
    /// Indices of features whose standard deviation is zero.
    pub fn flagged(&self) -> Vec<usize> {
        self.sds
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    fn check(&self, m: &FeatureMatrix) -> Result<(), StandardizeError> {
        if m.inventory_version != self.inventory_version {
            return Err(StandardizeError::InventoryMismatch {
                matrix: m.inventory_version.clone(),
                stats: self.inventory_version.clone(),
            });
        }
        if m.ncols() != self.means.len() {
            return Err(StandardizeError::Width {
                expected: self.means.len(),
                found: m.ncols(),
            });
        }
        Ok(())
    }
}

/// Column means and sample standard deviations (denominator N-1).
pub fn fit_stats(full_human: &FeatureMatrix) -> Result<StandardizationStats, StandardizeError> {
    let n = full_human.nrows();
    match n {
        0 => return Err(StandardizeError::Empty),
        1 => return Err(StandardizeError::SingleRow),
        _ => {}
    }
    let width = full_human.ncols();
    let mut means = vec![0.0; width];
    for row in full_human.rows() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n as f64);
    let mut sq = vec![0.0; width];
    for row in full_human.rows() {
        for ((s, v), m) in sq.iter_mut().zip(row).zip(&means) {
            *s += (v - m) * (v - m);
        }
    }
    let sds: Vec<f64> = sq.into_iter().map(|s| (s / (n - 1) as f64).sqrt()).collect();
    let stats = StandardizationStats {
        inventory_version: full_human.inventory_version.clone(),
        register: full_human.register.clone(),
        means,
        sds,
        fitted_on: n,
    };
    let flagged = stats.flagged();
    if !flagged.is_empty() {
        log::warn!("{} feature(s) have zero variance: {:?}", flagged.len(), flagged);
    }
    Ok(stats)
}

/// z-scores in the frame of `stats`; zero-variance features map to 0.
pub fn standardize(
    m: &FeatureMatrix,
    stats: &StandardizationStats,
) -> Result<FeatureMatrix, StandardizeError> {
    stats.check(m)?;
    let mut out = m.clone();
    for i in 0..out.nrows() {
        for (j, v) in out.row_mut(i).iter_mut().enumerate() {
            let sd = stats.sds[j];
            *v = if sd == 0.0 { 0.0 } else { (*v - stats.means[j]) / sd };
        }
    }
    out.frame = Frame::Standardized {
        register: stats.register.clone(),
        inventory_version: stats.inventory_version.clone(),
    };
    Ok(out)
}

pub fn unstandardize(
    z: &FeatureMatrix,
    stats: &StandardizationStats,
) -> Result<FeatureMatrix, StandardizeError> {
    stats.check(z)?;
    if z.frame == Frame::Raw {
        return Err(StandardizeError::NotStandardized);
    }
    let mut out = z.clone();
    for i in 0..out.nrows() {
        for (j, v) in out.row_mut(i).iter_mut().enumerate() {
            *v = *v * stats.sds[j] + stats.means[j];
        }
    }
    out.frame = Frame::Raw;
    Ok(out)
}

/// (feature name, dimension, loading), as published.
pub const LOADINGS: &[(&str, u8, f64)] = &[
    ("private verbs", 1, 0.96),
    ("THAT deletion", 1, 0.91),
    ("contractions", 1, 0.90),
    ("present tense verbs", 1, 0.86),
    ("2nd person pronouns", 1, 0.86),
    ("DO as pro-verb", 1, 0.82),
    ("analytic negation", 1, 0.78),
    ("demonstrative pronouns", 1, 0.76),
    ("general emphatics", 1, 0.74),
    ("1st person pronouns", 1, 0.74),
    ("pronoun it", 1, 0.71),
    ("BE as main verb", 1, 0.71),
    ("causative subordination", 1, 0.66),
    ("discourse particles", 1, 0.66),
    ("indefinite pronouns", 1, 0.62),
    ("general hedges", 1, 0.58),
    ("amplifiers", 1, 0.56),
    ("sentence relatives", 1, 0.55),
    ("WH questions", 1, 0.52),
    ("possibility modals", 1, 0.50),
    ("non-phrasal coordination", 1, 0.48),
    ("WH clauses", 1, 0.47),
    ("final prepositions", 1, 0.43),
    ("nouns", 1, -0.80),
    ("word length", 1, -0.58),
    ("prepositions", 1, -0.54),
    ("type/token ratio", 1, -0.54),
    ("attributive adjectives", 1, -0.47),
    ("past tense verbs", 2, 0.90),
    ("third person pronouns", 2, 0.73),
    ("perfect aspect verbs", 2, 0.48),
    ("public verbs", 2, 0.43),
    ("synthetic negation", 2, 0.40),
    ("present participial clauses", 2, 0.39),
    ("WH relative clauses on object positions", 3, 0.63),
    ("pied piping constructions", 3, 0.61),
    ("WH relative clauses on subject positions", 3, 0.45),
    ("phrasal coordination", 3, 0.36),
    ("nominalizations", 3, 0.36),
    ("time adverbials", 3, -0.60),
    ("place adverbials", 3, -0.49),
    ("adverbs", 3, -0.46),
    ("infinitives", 4, 0.76),
    ("prediction modals", 4, 0.54),
    ("suasive verbs", 4, 0.49),
    ("conditional subordination", 4, 0.47),
    ("necessity modals", 4, 0.46),
    ("split auxiliaries", 4, 0.44),
    ("conjuncts", 5, 0.48),
    ("agentless passives", 5, 0.43),
    ("past participial clauses", 5, 0.42),
    ("BY-passives", 5, 0.41),
    ("past participial WHIZ deletions", 5, 0.40),
    ("other adverbial subordinators", 5, 0.39),
    ("THAT clauses as verb complements", 6, 0.56),
    ("demonstratives", 6, 0.55),
    ("That relative clause on object positions", 6, 0.46),
    ("That clauses as adjective complements", 6, 0.36),
    ("SEEM / APPEAR", 7, 0.35),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Loading {
    pub feature: usize,
    pub feature_id: &'static str,
    pub dimension: u8,
    pub loading: f64,
}

/// The loadings table resolved against an inventory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionLoadings {
    pub entries: Vec<Loading>,
}

impl DimensionLoadings {
    pub fn for_inventory(inventory: &FeatureInventory) -> Result<Self, StandardizeError> {
        let entries = LOADINGS
            .iter()
            .map(|&(name, dimension, loading)| {
                let feature = inventory
                    .index_by_name(name)
                    .ok_or_else(|| StandardizeError::UnknownFeature(name.to_string()))?;
                Ok(Loading {
                    feature,
                    feature_id: inventory.features[feature].id,
                    dimension,
                    loading,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(DimensionLoadings { entries })
    }

    pub fn get(&self, feature_id: &str) -> Option<(u8, f64)> {
        self.entries
            .iter()
            .find(|e| e.feature_id == feature_id)
            .map(|e| (e.dimension, e.loading))
    }

    /// Scores on every dimension present in the table, including the
    /// single-feature seventh.
    pub fn score_all(&self, z: &[f64]) -> [f64; 7] {
        let mut scores = [0.0; 7];
        for e in &self.entries {
            scores[e.dimension as usize - 1] += e.loading * z[e.feature];
        }
        scores
    }

    pub fn score(&self, z: &[f64]) -> [f64; DIMENSIONS] {
        let all = self.score_all(z);
        let mut six = [0.0; DIMENSIONS];
        six.copy_from_slice(&all[..DIMENSIONS]);
        six
    }
}

impl Default for DimensionLoadings {
    fn default() -> Self {
        DimensionLoadings::for_inventory(&FeatureInventory::default())
            .expect("built-in loadings resolve against the built-in inventory")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionScores {
    pub doc_id: String,
    pub scores: [f64; DIMENSIONS],
}

pub fn dimension_scores(
    z: &FeatureMatrix,
    loadings: &DimensionLoadings,
) -> Result<Vec<DimensionScores>, StandardizeError> {
    if z.frame == Frame::Raw {
        return Err(StandardizeError::NotStandardized);
    }
    let ids = z.doc_ids();
    Ok(par::map_range(z.nrows(), |i| DimensionScores {
        doc_id: ids[i].clone(),
        scores: loadings.score(z.row(i)),
    }))
}

/// Column `d` of a score list.
pub fn dimension_column(scores: &[DimensionScores], d: usize) -> Vec<f64> {
    scores.iter().map(|s| s.scores[d]).collect()
}
