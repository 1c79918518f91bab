//! Synthetic feature matrices and tagged documents.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use regmmd::corpus::{Sentence, TaggedDocument, TaggedToken};
use regmmd::matrix::FeatureMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `rows` draws of `mean + sd * N(0, I)`.
pub fn gaussian_with(rows: usize, mean: &[f64], sd: &[f64], seed: u64, prefix: &str) -> FeatureMatrix {
    let width = mean.len();
    let mut r = rng(seed);
    let mut m = FeatureMatrix::new("synthetic", prefix, "B1988-67", width);
    for i in 0..rows {
        let row: Vec<f64> = (0..width)
            .map(|j| mean[j] + sd[j] * r.sample::<f64, _>(StandardNormal))
            .collect();
        m.push_row(format!("{prefix}{i:05}"), &row).unwrap();
    }
    m
}

pub fn gaussian(rows: usize, width: usize, seed: u64) -> FeatureMatrix {
    gaussian_with(rows, &vec![0.0; width], &vec![1.0; width], seed, "h")
}

pub fn uniform_rows(rows: usize, width: usize, r: &mut impl Rng) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..width).map(|_| r.random_range(-2.0..2.0)).collect())
        .collect()
}

pub fn word(form: &str, head: usize) -> TaggedToken {
    TaggedToken::new(form, form, "NOUN", Some("NN"), head, "dep")
}

/// A sentence of `lexical` nouns followed by a full stop.
pub fn sentence(lexical: usize, tag: usize) -> Sentence {
    let mut tokens: Vec<TaggedToken> = (0..lexical)
        .map(|i| word(&format!("w{tag}_{i}"), if i == 0 { 0 } else { 1 }))
        .collect();
    tokens.push(TaggedToken::new(".", ".", "PUNCT", Some("."), 1, "punct"));
    Sentence::new(tokens)
}

pub fn document(lengths: &[usize]) -> TaggedDocument {
    let mut d = TaggedDocument::new("synthetic", "r");
    d.sentences = lengths.iter().enumerate().map(|(k, &n)| sentence(n, k)).collect();
    d
}
