//! Lexicon-based psycholinguistic text analysis.
//!
//! Documents are tokenized and stemmed, matched against rated category
//! wordlists, and turned into per-category scores. On top of the scores sit
//! internal-consistency and correlation measures, group comparisons with
//! effect sizes and Bayes factors, and a Naive Bayes classification harness.
//! The `builder` module reconstructs lexicons from seed words, expansions and
//! crowdsourced ratings.

pub mod builder;
pub mod classifier;
pub mod cli;
pub mod error;
pub mod inferstats;
pub mod lexicon;
pub mod psychometrics;
pub mod report;
pub mod sampling;
pub mod scorer;
pub mod stats;
pub mod textprep;

pub use error::{Error, Result};
