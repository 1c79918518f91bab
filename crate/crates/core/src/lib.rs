//! Register-aware comparison of human and machine-generated text.
//!
//! Documents are ingested as dependency-tagged CoNLL-U, mapped to 67
//! lexico-grammatical feature rates, standardized against a full human
//! reference corpus and compared with kernel two-sample statistics.

pub mod corpus;
pub mod detector;
pub mod dimensions;
pub mod features;
pub mod harness;
pub mod matrix;
mod par;
pub mod sampler;
pub mod stats;
pub mod text_prep;
