//! L2-regularized logistic regression separating human from generated text.

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::FeatureMatrix;
use crate::par;
use crate::stats::stream_rng;

pub const DEFAULT_L2_GRID: [f64; 5] = [0.001, 0.01, 0.1, 1.0, 10.0];
pub const DEFAULT_FOLDS: usize = 5;
pub const GRADIENT_TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum DetectorError {
    #[error("class `{0}` has no rows")]
    EmptyClass(&'static str),
    #[error("{rows} rows but {labels} labels")]
    LabelCount { rows: usize, labels: usize },
    #[error("test fraction must lie in (0, 1), got {0}")]
    TestFraction(f64),
    #[error("model has {model} weights, data has {data} features")]
    Width { model: usize, data: usize },
    #[error("each class needs at least {folds} rows for {folds}-fold cross-validation")]
    TooFewForFolds { folds: usize },
    #[error("empty regularization grid")]
    EmptyGrid,
}

pub const HUMAN: u8 = 0;
pub const AI: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub features: FeatureMatrix,
    /// 0 = human, 1 = generated.
    pub labels: Vec<u8>,
    pub register: String,
}

impl LabeledDataset {
    pub fn new(features: FeatureMatrix, labels: Vec<u8>, register: &str) -> Result<Self, DetectorError> {
        if features.nrows() != labels.len() {
            return Err(DetectorError::LabelCount {
                rows: features.nrows(),
                labels: labels.len(),
            });
        }
        Ok(LabeledDataset {
            features,
            labels,
            register: register.to_string(),
        })
    }

    /// Stacks a human and a generated matrix.
    pub fn from_pair(human: &FeatureMatrix, ai: &FeatureMatrix, register: &str) -> Result<Self, DetectorError> {
        let features = human.concat(ai).map_err(|_| DetectorError::Width {
            model: human.ncols(),
            data: ai.ncols(),
        })?;
        let mut labels = vec![HUMAN; human.nrows()];
        labels.extend(std::iter::repeat_n(AI, ai.nrows()));
        LabeledDataset::new(features, labels, register)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let ai = self.labels.iter().filter(|&&l| l == AI).count();
        (self.labels.len() - ai, ai)
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            features: self.features.select(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            register: self.register.clone(),
        }
    }

    fn class_indices(&self, label: u8) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == label).collect()
    }

    fn check_classes(&self) -> Result<(), DetectorError> {
        let (h, a) = self.class_counts();
        if h == 0 {
            return Err(DetectorError::EmptyClass("human"));
        }
        if a == 0 {
            return Err(DetectorError::EmptyClass("ai"));
        }
        Ok(())
    }
}

/// Downsamples the majority class to the minority size, then splits each
/// class so that `test_fraction` of it (rounded) lands in the test set.
pub fn balance_and_split(
    data: &LabeledDataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset), DetectorError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(DetectorError::TestFraction(test_fraction));
    }
    data.check_classes()?;
    let human = data.class_indices(HUMAN);
    let ai = data.class_indices(AI);
    let k = human.len().min(ai.len());
    let mut rng = stream_rng(seed, 0);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in [human, ai] {
        let mut kept: Vec<usize> = index::sample(&mut rng, class.len(), k)
            .into_iter()
            .map(|i| class[i])
            .collect();
        kept.sort_unstable();
        kept.shuffle(&mut rng);
        let n_test = (k as f64 * test_fraction).round() as usize;
        test.extend_from_slice(&kept[..n_test]);
        train.extend_from_slice(&kept[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((data.subset(&train), data.subset(&test)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2: f64,
    pub inventory_version: String,
    pub converged: bool,
    pub iterations: usize,
    /// Mean cross-validated ROC AUC for each grid value, when tuned.
    #[serde(default)]
    pub cv_auc: Vec<(f64, f64)>,
}

impl LogRegModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.bias + dot(&self.weights, x)
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.decision(x))
    }

    pub fn scores(&self, m: &FeatureMatrix) -> Vec<f64> {
        m.rows().map(|r| self.predict_proba(r)).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(s))` without overflow.
fn softplus(s: f64) -> f64 {
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

/// Mean negative log-likelihood plus `(l2 / 2) |w|^2`; the bias (last
/// parameter) is not penalized. Returns the loss and its gradient.
pub fn loss_and_grad(params: &[f64], x: &FeatureMatrix, y: &[u8], l2: f64) -> (f64, Vec<f64>) {
    let d = x.ncols();
    let (w, b) = (&params[..d], params[d]);
    let n = x.nrows() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; d + 1];
    for (row, &label) in x.rows().zip(y) {
        let s = b + dot(w, row);
        let t = label as f64;
        loss += softplus(s) - t * s;
        let r = sigmoid(s) - t;
        for (g, v) in grad[..d].iter_mut().zip(row) {
            *g += r * v;
        }
        grad[d] += r;
    }
    loss /= n;
    grad.iter_mut().for_each(|g| *g /= n);
    loss += 0.5 * l2 * dot(w, w);
    for (g, wi) in grad[..d].iter_mut().zip(w) {
        *g += l2 * wi;
    }
    (loss, grad)
}

/// Result of one optimizer run, with the loss at every accepted step.
#[derive(Debug, Clone)]
pub struct FitTrace {
    pub params: Vec<f64>,
    pub losses: Vec<f64>,
    pub converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// L-BFGS with Armijo backtracking.
pub fn fit(x: &FeatureMatrix, y: &[u8], l2: f64, max_iter: usize) -> FitTrace {
    const MEMORY: usize = 10;
    let dim = x.ncols() + 1;
    let mut p = vec![0.0; dim];
    let (mut f, mut g) = loss_and_grad(&p, x, y, l2);
    let mut losses = vec![f];
    let mut hist: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> = Default::default();
    let mut converged = norm(&g) < GRADIENT_TOLERANCE;
    let mut iter = 0;
    while !converged && iter < max_iter {
        iter += 1;
        // Two-loop recursion for the search direction.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, yv, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(yv).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, yv, _)) = hist.back() {
            let gamma = dot(s, yv) / dot(yv, yv);
            q.iter_mut().for_each(|qi| *qi *= gamma);
        }
        for ((s, yv, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let bcoef = rho * dot(yv, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - bcoef) * si);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 {
            hist.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = if hist.is_empty() { 1.0 / norm(&g).max(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = p.iter().zip(&dir).map(|(pi, di)| pi + step * di).collect();
            let (fc, gc) = loss_and_grad(&cand, x, y, l2);
            if fc <= f + 1e-4 * step * slope {
                accepted = Some((cand, fc, gc));
                break;
            }
            step *= 0.5;
        }
        let Some((np, nf, ng)) = accepted else {
            break;
        };
        let s: Vec<f64> = np.iter().zip(&p).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = ng.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-12 {
            if hist.len() == MEMORY {
                hist.pop_front();
            }
            hist.push_back((s, yv, 1.0 / sy));
        }
        p = np;
        f = nf;
        g = ng;
        losses.push(f);
        converged = norm(&g) < GRADIENT_TOLERANCE;
    }
    FitTrace {
        params: p,
        losses,
        converged,
    }
}

fn fit_model(data: &LabeledDataset, l2: f64) -> LogRegModel {
    let trace = fit(&data.features, &data.labels, l2, MAX_ITERATIONS);
    let d = data.features.ncols();
    if !trace.converged {
        log::warn!("logistic regression (l2 = {l2}) stopped before reaching tolerance");
    }
    LogRegModel {
        weights: trace.params[..d].to_vec(),
        bias: trace.params[d],
        l2,
        inventory_version: data.features.inventory_version.clone(),
        converged: trace.converged,
        iterations: trace.losses.len() - 1,
        cv_auc: Vec::new(),
    }
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin.
pub fn stratified_folds(labels: &[u8], folds: usize, seed: u64) -> Vec<usize> {
    let mut assignment = vec![0; labels.len()];
    let mut rng = stream_rng(seed, 1);
    for class in [HUMAN, AI] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for (k, i) in idx.into_iter().enumerate() {
            assignment[i] = k % folds;
        }
    }
    assignment
}

/// Mean held-out ROC AUC of `l2` under `folds`-fold cross-validation.
pub fn cross_validated_auc(data: &LabeledDataset, l2: f64, folds: usize, seed: u64) -> f64 {
    let assignment = stratified_folds(&data.labels, folds, seed);
    let aucs = par::map_range(folds, |k| {
        let train: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] != k).collect();
        let held: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] == k).collect();
        let model = fit_model(&data.subset(&train), l2);
        let test = data.subset(&held);
        roc_auc(&model.scores(&test.features), &test.labels).unwrap_or(0.5)
    });
    aucs.iter().sum::<f64>() / folds as f64
}

/// Picks the grid value with the best cross-validated AUC (earliest on
/// ties) and refits on all of `train`.
pub fn train_logreg(
    train: &LabeledDataset,
    l2_grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<LogRegModel, DetectorError> {
    train.check_classes()?;
    if l2_grid.is_empty() {
        return Err(DetectorError::EmptyGrid);
    }
    let (h, a) = train.class_counts();
    if h.min(a) < folds {
        return Err(DetectorError::TooFewForFolds { folds });
    }
    let cv_auc: Vec<(f64, f64)> = l2_grid
        .iter()
        .map(|&l2| (l2, cross_validated_auc(train, l2, folds, seed)))
        .collect();
    let best = cv_auc
        .iter()
        .copied()
        .fold((l2_grid[0], f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    let mut model = fit_model(train, best.0);
    model.cv_auc = cv_auc;
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub accuracy: f64,
    /// `None` when the test set holds a single class.
    pub roc_auc: Option<f64>,
    pub split: String,
}

pub fn evaluate(model: &LogRegModel, test: &LabeledDataset) -> Result<EvalMetrics, DetectorError> {
    if model.weights.len() != test.features.ncols() {
        return Err(DetectorError::Width {
            model: model.weights.len(),
            data: test.features.ncols(),
        });
    }
    let scores = model.scores(&test.features);
    let correct = scores
        .iter()
        .zip(&test.labels)
        .filter(|(s, &l)| (**s >= 0.5) == (l == AI))
        .count();
    let roc_auc = roc_auc(&scores, &test.labels);
    if roc_auc.is_none() {
        log::warn!("ROC AUC undefined: test set holds a single class");
    }
    let (h, a) = test.class_counts();
    Ok(EvalMetrics {
        accuracy: correct as f64 / test.len().max(1) as f64,
        roc_auc,
        split: format!("test: {h} human / {a} ai"),
    })
}

/// Rank statistic; tied scores share the average rank, so each tied
/// positive-negative pair contributes one half.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Option<f64> {
    let pos = labels.iter().filter(|&&l| l == AI).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += avg_rank * order[i..=j].iter().filter(|&&k| labels[k] == AI).count() as f64;
        i = j + 1;
    }
    let (p, n) = (pos as f64, neg as f64);
    Some((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}
