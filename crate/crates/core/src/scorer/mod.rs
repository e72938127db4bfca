//! Matching lexicon keys against documents and computing category scores.

mod matcher;
mod table;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::textprep::{Corpus, Document};

pub use matcher::Matcher;
pub use table::{counts_path, read_score_csv, write_counts_csv, write_score_csv, ScoreTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMode {
    /// Category matches divided by document token count.
    Proportional,
    /// Mean rating over all matches in the category.
    Weighted,
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreMode::Proportional => "proportional",
            ScoreMode::Weighted => "weighted",
        })
    }
}

impl FromStr for ScoreMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proportional" => Ok(ScoreMode::Proportional),
            "weighted" => Ok(ScoreMode::Weighted),
            other => Err(Error::Argument(format!("unknown score mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyMatch {
    pub category: String,
    pub key: String,
    pub count: u32,
}

/// Scores for one document; `scores` and `match_counts` follow the category
/// order of the lexicon (or score table) that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreProfile {
    pub doc_id: String,
    pub mode: ScoreMode,
    pub token_count: usize,
    pub scores: Vec<f64>,
    /// Empty when the profile was read from a score table without counts.
    pub match_counts: Vec<u64>,
}

/// A lexicon compiled for repeated scoring.
#[derive(Debug, Clone)]
pub struct Scorer<'a> {
    lex: &'a Lexicon,
    matcher: Matcher,
    entry_category: Vec<usize>,
}

impl<'a> Scorer<'a> {
    pub fn new(lex: &'a Lexicon) -> Self {
        let entry_category = lex
            .entries()
            .iter()
            .map(|e| lex.category_index(&e.category).expect("validated lexicon"))
            .collect();
        Scorer {
            lex,
            matcher: Matcher::new(lex),
            entry_category,
        }
    }

    pub fn lexicon(&self) -> &Lexicon {
        self.lex
    }

    pub fn entry_counts(&self, doc: &Document) -> Vec<u32> {
        self.matcher.entry_counts(&doc.tokens)
    }

    pub fn matches(&self, doc: &Document) -> Vec<KeyMatch> {
        self.entry_counts(doc)
            .into_iter()
            .zip(self.lex.entries())
            .filter(|(count, _)| *count > 0)
            .map(|(count, e)| KeyMatch {
                category: e.category.clone(),
                key: e.key.clone(),
                count,
            })
            .collect()
    }

    pub fn score(&self, doc: &Document, mode: ScoreMode) -> ScoreProfile {
        let counts = self.entry_counts(doc);
        let n_cat = self.lex.categories().len();
        let mut match_counts = vec![0u64; n_cat];
        let mut rating_sums = vec![0.0f64; n_cat];
        for ((&count, entry), &cat) in counts
            .iter()
            .zip(self.lex.entries())
            .zip(&self.entry_category)
        {
            if count > 0 {
                match_counts[cat] += u64::from(count);
                rating_sums[cat] += f64::from(count) * entry.mean_rating;
            }
        }
        let token_count = doc.token_count();
        let scores = match mode {
            ScoreMode::Proportional => match_counts
                .iter()
                .map(|&m| {
                    if token_count == 0 {
                        0.0
                    } else {
                        m as f64 / token_count as f64
                    }
                })
                .collect(),
            ScoreMode::Weighted => match_counts
                .iter()
                .zip(&rating_sums)
                .map(|(&m, &sum)| if m == 0 { 0.0 } else { sum / m as f64 })
                .collect(),
        };
        ScoreProfile {
            doc_id: doc.id.clone(),
            mode,
            token_count,
            scores,
            match_counts,
        }
    }

    /// Scores every document, in parallel, preserving corpus order.
    pub fn score_corpus(&self, corpus: &Corpus, mode: ScoreMode) -> ScoreTable {
        let profiles = corpus
            .docs
            .par_iter()
            .map(|doc| self.score(doc, mode))
            .collect();
        ScoreTable {
            mode,
            categories: self.lex.categories().to_vec(),
            profiles,
        }
    }

    pub fn word_occurrence_matrix(
        &self,
        corpus: &Corpus,
        category: &str,
    ) -> Result<WordOccurrenceMatrix> {
        let cat = self
            .lex
            .category_index(category)
            .ok_or_else(|| Error::Argument(format!("unknown category {category:?}")))?;
        let columns: Vec<usize> = (0..self.lex.len())
            .filter(|&i| self.entry_category[i] == cat)
            .collect();
        let rows = corpus
            .docs
            .par_iter()
            .map(|doc| {
                let counts = self.entry_counts(doc);
                let n = doc.token_count();
                columns
                    .iter()
                    .map(|&i| {
                        if n == 0 {
                            0.0
                        } else {
                            f64::from(counts[i]) / n as f64
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(WordOccurrenceMatrix {
            category: category.to_string(),
            doc_ids: corpus.docs.iter().map(|d| d.id.clone()).collect(),
            keys: columns
                .iter()
                .map(|&i| self.lex.entries()[i].key.clone())
                .collect(),
            rows,
        })
    }
}

/// Per-document proportional occurrence of each key in one category.
#[derive(Debug, Clone, PartialEq)]
pub struct WordOccurrenceMatrix {
    pub category: String,
    pub doc_ids: Vec<String>,
    /// Column labels in canonical lexicon order.
    pub keys: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl WordOccurrenceMatrix {
    /// Builds a bare matrix from rows, for callers that already hold item data.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let k = rows.first().map_or(0, Vec::len);
        WordOccurrenceMatrix {
            category: String::new(),
            doc_ids: (0..rows.len()).map(|i| i.to_string()).collect(),
            keys: (0..k).map(|j| j.to_string()).collect(),
            rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.keys.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

pub fn match_document(doc: &Document, lex: &Lexicon) -> Vec<KeyMatch> {
    Scorer::new(lex).matches(doc)
}

pub fn score_proportional(doc: &Document, lex: &Lexicon) -> ScoreProfile {
    Scorer::new(lex).score(doc, ScoreMode::Proportional)
}

pub fn score_weighted(doc: &Document, lex: &Lexicon) -> ScoreProfile {
    Scorer::new(lex).score(doc, ScoreMode::Weighted)
}

pub fn score_corpus(corpus: &Corpus, lex: &Lexicon, mode: ScoreMode) -> ScoreTable {
    Scorer::new(lex).score_corpus(corpus, mode)
}

pub fn word_occurrence_matrix(
    corpus: &Corpus,
    lex: &Lexicon,
    category: &str,
) -> Result<WordOccurrenceMatrix> {
    Scorer::new(lex).word_occurrence_matrix(corpus, category)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::LexiconEntry;

    fn weaponry() -> Lexicon {
        Lexicon::new(
            vec!["weaponry".into(), "hate".into()],
            vec![
                LexiconEntry::new("gun", "weaponry", 8.0, 3),
                LexiconEntry::new("knife", "weaponry", 6.0, 3),
            ],
            "",
            None,
        )
        .unwrap()
    }

    fn doc(text: &str) -> Document {
        Document::new("d", text, None)
    }

    #[test]
    fn match_counts_two_weapons() {
        let m = match_document(&doc("the gun and the knife"), &weaponry());
        let total: u32 = m
            .iter()
            .filter(|k| k.category == "weaponry")
            .map(|k| k.count)
            .sum();
        assert_eq!(total, 2);
        assert!(match_document(&doc("hello world"), &weaponry()).is_empty());
    }

    #[test]
    fn phrase_consumes_tokens_within_category() {
        let lex = Lexicon::from_entries(
            vec![
                LexiconEntry::new("last resort", "desperation", 8.0, 3),
                LexiconEntry::new("resort", "desperation", 6.0, 3),
            ],
            "",
        )
        .unwrap();
        let m = match_document(&doc("last resort resort"), &lex);
        assert_eq!(
            m,
            vec![
                KeyMatch {
                    category: "desperation".into(),
                    key: "last resort".into(),
                    count: 1
                },
                KeyMatch {
                    category: "desperation".into(),
                    key: "resort".into(),
                    count: 1
                },
            ]
        );
    }

    #[test]
    fn inflected_tokens_meet_stems() {
        let lex =
            Lexicon::from_entries(vec![LexiconEntry::new("kill", "murder", 9.0, 2)], "").unwrap();
        let p = score_proportional(&doc("Killing kills; killed."), &lex);
        assert_eq!(p.match_counts, vec![3]);
        assert_eq!(p.scores, vec![1.0]);
    }

    #[test]
    fn proportional_examples() {
        let p = score_proportional(&doc("the gun and the knife"), &weaponry());
        assert_eq!(p.token_count, 5);
        assert_eq!(p.scores, vec![0.4, 0.0]);

        let empty = score_proportional(&doc(""), &weaponry());
        assert_eq!(empty.token_count, 0);
        assert_eq!(empty.scores, vec![0.0, 0.0]);

        let p = score_proportional(&doc("gun gun gun a b c d e f g"), &weaponry());
        assert_eq!(p.scores, vec![0.3, 0.0]);
    }

    #[test]
    fn weighted_examples() {
        let p = score_weighted(&doc("the gun and the knife"), &weaponry());
        assert_eq!(p.scores[0], 7.0);
        assert_eq!(p.scores[1], 0.0);
        assert_eq!(p.match_counts[1], 0);

        let lex =
            Lexicon::from_entries(vec![LexiconEntry::new("bomb", "weaponry", 9.2, 2)], "").unwrap();
        assert_eq!(score_weighted(&doc("a bomb"), &lex).scores, vec![9.2]);
    }

    #[test]
    fn corpus_order_and_determinism() {
        let corpus = Corpus::new(
            "c",
            vec![
                Document::new("x", "the gun and the knife", None),
                Document::new("y", "nothing here", None),
                Document::new("z", "knife", None),
            ],
        )
        .unwrap();
        let a = score_corpus(&corpus, &weaponry(), ScoreMode::Proportional);
        let b = score_corpus(&corpus, &weaponry(), ScoreMode::Proportional);
        assert_eq!(a, b);
        let ids: Vec<_> = a.profiles.iter().map(|p| p.doc_id.as_str()).collect();
        assert_eq!(ids, ["x", "y", "z"]);
        assert_eq!(a.profiles[0].scores[0], 0.4);
        assert!(score_corpus(
            &Corpus::new("e", vec![]).unwrap(),
            &weaponry(),
            ScoreMode::Weighted
        )
        .profiles
        .is_empty());
    }

    #[test]
    fn occurrence_matrix_hand_counts() {
        let corpus = Corpus::new(
            "c",
            vec![
                Document::new("a", "gun gun knife x", None),
                Document::new("b", "knife y", None),
            ],
        )
        .unwrap();
        let m = word_occurrence_matrix(&corpus, &weaponry(), "weaponry").unwrap();
        assert_eq!(m.keys, ["gun", "knife"]);
        assert_eq!(m.rows, vec![vec![0.5, 0.25], vec![0.0, 0.5]]);

        let none = word_occurrence_matrix(
            &Corpus::new("n", vec![Document::new("a", "peace", None)]).unwrap(),
            &weaponry(),
            "weaponry",
        )
        .unwrap();
        assert_eq!(none.rows, vec![vec![0.0, 0.0]]);

        assert!(matches!(
            word_occurrence_matrix(&corpus, &weaponry(), "nope"),
            Err(Error::Argument(_))
        ));
    }
}
