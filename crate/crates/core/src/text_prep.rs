//! String cleaning, lexical-token counting, and fixed-length truncation.
//!
//! Human and generated texts go through exactly the same functions here so
//! that neither side picks up a positional bias from truncation.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::{Sentence, TaggedDocument};

pub const SOFT_LIMIT: usize = 400;
pub const HARD_LIMIT: usize = 440;
pub const PUNCT_RATIO_THRESHOLD: f64 = 0.2;

/// Closing punctuation that never keeps a preceding space.
const CLOSING_PUNCT: &[char] = &['.', ',', ';', ':', '!', '?', ')', ']', '}', '\'', '"'];

#[derive(Debug, Error, PartialEq)]
pub enum PrepError {
    #[error("soft limit {soft} exceeds hard limit {hard}")]
    Limits { soft: usize, hard: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub original_len: usize,
    pub cleaned_len: usize,
    /// Whitespace runs that were rewritten (anything other than a lone space).
    pub replacements: usize,
    /// Whether NFKC changed the text.
    pub normalized: bool,
}

pub fn clean_text(raw: &str) -> (String, CleaningReport) {
    let nfkc: String = raw.nfkc().collect();
    let normalized = nfkc != raw;

    let mut collapsed = String::with_capacity(nfkc.len());
    let mut replacements = 0;
    let mut run = String::new();
    let flush = |run: &mut String, out: &mut String, replacements: &mut usize| {
        if !run.is_empty() {
            if run != " " {
                *replacements += 1;
            }
            out.push(' ');
            run.clear();
        }
    };
    for c in nfkc.chars() {
        if c.is_whitespace() {
            run.push(c);
        } else {
            flush(&mut run, &mut collapsed, &mut replacements);
            collapsed.push(c);
        }
    }
    flush(&mut run, &mut collapsed, &mut replacements);

    let mut cleaned = String::with_capacity(collapsed.len());
    let mut chars = collapsed.chars().peekable();
    while let Some(c) = chars.next() {
        if c == ' ' && chars.peek().is_some_and(|n| CLOSING_PUNCT.contains(n)) {
            continue;
        }
        cleaned.push(c);
    }
    let cleaned = cleaned.trim().to_string();

    let report = CleaningReport {
        original_len: raw.chars().count(),
        cleaned_len: cleaned.chars().count(),
        replacements,
        normalized,
    };
    (cleaned, report)
}

pub fn count_lexical_tokens(doc: &TaggedDocument) -> usize {
    doc.tokens().filter(|t| t.is_lexical()).count()
}

/// Word count for untagged text such as metadata values: whitespace
/// separated pieces that contain at least one alphanumeric character.
pub fn count_words(text: &str) -> usize {
    text.split_whitespace()
        .filter(|w| w.chars().any(char::is_alphanumeric))
        .count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationResult {
    pub text: String,
    pub lexical_tokens: usize,
    pub truncated: bool,
    pub hit_hard_limit: bool,
    #[serde(skip)]
    pub document: Option<TaggedDocument>,
}

/// Keeps whole sentences until `soft` lexical tokens are reached. The
/// sentence that crosses `soft` is kept whole if it ends within `hard`,
/// otherwise it is cut right after the `hard`-th lexical token.
pub fn truncate_to_limit(
    doc: &TaggedDocument,
    soft: usize,
    hard: usize,
) -> Result<TruncationResult, PrepError> {
    if soft > hard {
        return Err(PrepError::Limits { soft, hard });
    }
    let total = count_lexical_tokens(doc);
    if total < soft {
        return Ok(TruncationResult {
            text: doc.text(),
            lexical_tokens: total,
            truncated: false,
            hit_hard_limit: false,
            document: Some(doc.clone()),
        });
    }

    let mut kept: Vec<Sentence> = Vec::new();
    let mut count = 0;
    let mut hit_hard_limit = false;
    for sentence in &doc.sentences {
        if count >= soft {
            break;
        }
        let len = sentence.lexical_len();
        if count + len <= hard {
            kept.push(sentence.clone());
            count += len;
            continue;
        }
        let mut tokens = Vec::new();
        for token in &sentence.tokens {
            if count == hard {
                break;
            }
            if token.is_lexical() {
                count += 1;
            }
            tokens.push(token.clone());
        }
        // Heads pointing past the cut become roots of the fragment.
        let cut_len = tokens.len();
        for token in &mut tokens {
            if token.head > cut_len {
                token.head = 0;
            }
        }
        kept.push(Sentence { text: None, tokens });
        hit_hard_limit = true;
        break;
    }

    let mut truncated_doc = doc.clone();
    truncated_doc.sentences = kept;
    Ok(TruncationResult {
        text: truncated_doc.text(),
        lexical_tokens: count,
        truncated: true,
        hit_hard_limit,
        document: Some(truncated_doc),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub id: String,
    pub reason: String,
    pub ratio: Option<f64>,
}

/// Drops documents whose punctuation-to-lexical-token ratio exceeds
/// `threshold`. Documents without lexical tokens are dropped as "empty".
pub fn punctuation_ratio_filter(
    docs: Vec<TaggedDocument>,
    threshold: f64,
) -> (Vec<TaggedDocument>, Vec<Exclusion>) {
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for doc in docs {
        let lexical = count_lexical_tokens(&doc);
        let punct = doc.tokens().filter(|t| t.is_punct).count();
        if lexical == 0 {
            excluded.push(Exclusion {
                id: doc.doc_id,
                reason: "empty".into(),
                ratio: None,
            });
            continue;
        }
        let ratio = punct as f64 / lexical as f64;
        if ratio > threshold {
            excluded.push(Exclusion {
                id: doc.doc_id,
                reason: "punctuation_ratio".into(),
                ratio: Some(ratio),
            });
        } else {
            kept.push(doc);
        }
    }
    (kept, excluded)
}

pub fn min_length_filter(
    docs: Vec<TaggedDocument>,
    min_lexical_tokens: usize,
) -> (Vec<TaggedDocument>, Vec<Exclusion>) {
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for doc in docs {
        let lexical = count_lexical_tokens(&doc);
        if lexical < min_lexical_tokens {
            excluded.push(Exclusion {
                id: doc.doc_id,
                reason: "too_short".into(),
                ratio: None,
            });
        } else {
            kept.push(doc);
        }
    }
    (kept, excluded)
}

/// Serializes exclusions as JSONL audit lines.
pub fn exclusions_jsonl(exclusions: &[Exclusion]) -> String {
    exclusions
        .iter()
        .map(|e| serde_json::to_string(e).expect("exclusion serializes") + "\n")
        .collect()
}
