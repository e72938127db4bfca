//! Lexicon construction: seed words, synonym and embedding expansion,
//! candidate merging, and ingestion of crowdsourced ratings.

mod embeddings;
mod inputs;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, LexiconEntry};
use crate::textprep::normalize_key;

pub use embeddings::{load_embeddings, parse_embeddings, EmbeddingTable};
pub use inputs::{
    load_ratings, load_seeds, load_synonyms, parse_ratings, parse_seeds, parse_synonyms,
    RatingRecord, SeedList, SynonymProvider,
};

pub const DEFAULT_NEIGHBOURS: usize = 10;
/// Share of "unknown" answers at or above which a word is dropped.
pub const UNKNOWN_DROP_SHARE: f64 = 0.5;
/// Thresholds of the two filtered lexicon versions emitted by a build.
pub const BUILD_THRESHOLDS: [f64; 2] = [7.0, 5.0];

/// Words produced by one expansion step, and how many inputs it could not use.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub words: Vec<String>,
    pub missing: usize,
}

fn push_unique(out: &mut Vec<String>, seen: &mut HashSet<String>, word: String) {
    if seen.insert(word.clone()) {
        out.push(word);
    }
}

/// Seeds followed by their related words, first occurrence kept.
pub fn expand_synonyms(seeds: &SeedList, provider: &SynonymProvider) -> Expansion {
    let mut words = Vec::new();
    let mut seen = HashSet::new();
    for s in &seeds.words {
        push_unique(&mut words, &mut seen, s.clone());
    }
    let mut missing = 0;
    for s in &seeds.words {
        match provider.related(s) {
            Some(related) => {
                for r in related {
                    push_unique(&mut words, &mut seen, r.clone());
                }
            }
            None => missing += 1,
        }
    }
    Expansion { words, missing }
}

/// The `k` nearest neighbours of every in-vocabulary seed, in seed order.
/// Neighbours are lowercased with underscores read as spaces. Seeds that are
/// out of vocabulary (or have a zero vector) count as missing.
pub fn expand_embeddings(seeds: &SeedList, table: &EmbeddingTable, k: usize) -> Result<Expansion> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    if table.is_empty() {
        return Err(Error::Argument("embedding vocabulary is empty".into()));
    }
    let per_seed: Vec<Option<Vec<String>>> = seeds
        .words
        .par_iter()
        .map(|s| {
            let row = table.lookup(s).filter(|&r| table.has_unit_vector(r))?;
            Some(
                table
                    .nearest(row, k)
                    .into_iter()
                    .map(|(w, _)| w.replace('_', " ").to_lowercase())
                    .collect(),
            )
        })
        .collect();
    let missing = per_seed.iter().filter(|x| x.is_none()).count();
    Ok(Expansion {
        words: per_seed.into_iter().flatten().flatten().collect(),
        missing,
    })
}

/// Per-category candidate words.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub categories: Vec<(String, Vec<String>)>,
}

impl CandidateSet {
    pub fn total(&self) -> usize {
        self.categories.iter().map(|c| c.1.len()).sum()
    }

    pub fn contains(&self, category: &str, word: &str) -> bool {
        self.categories
            .iter()
            .any(|(c, words)| c == category && words.iter().any(|w| w == word))
    }
}

/// Removes duplicates within each category; a word may stay a candidate in
/// several categories.
pub fn merge_candidates(lists: Vec<(String, Vec<String>)>) -> CandidateSet {
    let mut merged: Vec<(String, Vec<String>, HashSet<String>)> = Vec::new();
    for (category, words) in lists {
        let slot = match merged.iter().position(|m| m.0 == category) {
            Some(i) => i,
            None => {
                merged.push((category, Vec::new(), HashSet::new()));
                merged.len() - 1
            }
        };
        let (_, out, seen) = &mut merged[slot];
        for w in words {
            push_unique(out, seen, w);
        }
    }
    CandidateSet {
        categories: merged.into_iter().map(|(c, w, _)| (c, w)).collect(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub records_total: usize,
    pub participants_total: usize,
    pub participants_dropped: usize,
    pub records_dropped_attention: usize,
    /// (word, category) pairs left after the attention filter.
    pub words_rated: usize,
    pub words_dropped_unknown: usize,
    /// Candidates (or rated words) left with no numeric rating.
    pub words_dropped_no_ratings: usize,
    /// Words that produce no tokens, so have no stem key.
    pub words_dropped_no_key: usize,
    pub final_stems: usize,
}

/// Turns ratings into the weighted, unthresholded lexicon.
///
/// Order of operations: drop every record of a participant who failed any
/// attention check; drop a (word, category) when unknown answers make up
/// half or more of its remaining records; pool the remaining numeric ratings
/// per (stem, category) and take the flat mean. Means are rounded to six
/// decimals, the precision of the lexicon file.
///
/// With `candidates`, every record must name a candidate, and candidates
/// without surviving ratings are counted as dropped.
pub fn ingest_ratings(
    records: &[RatingRecord],
    candidates: Option<&CandidateSet>,
) -> Result<(Lexicon, IngestReport)> {
    let mut report = IngestReport {
        records_total: records.len(),
        ..Default::default()
    };
    if let Some(c) = candidates {
        if let Some(r) = records.iter().find(|r| !c.contains(&r.category, &r.word)) {
            return Err(Error::Validation(format!(
                "rating for ({:?}, {:?}) which is not a candidate",
                r.word, r.category
            )));
        }
    }

    let mut participants: HashMap<&str, bool> = HashMap::new();
    for r in records {
        *participants
            .entry(r.participant_id.as_str())
            .or_insert(true) &= r.attention_pass;
    }
    report.participants_total = participants.len();
    report.participants_dropped = participants.values().filter(|&&ok| !ok).count();

    // BTreeMap keeps the fold independent of record order
    let mut per_word: BTreeMap<(&str, &str), (usize, Vec<u8>)> = BTreeMap::new();
    for r in records {
        if !participants[r.participant_id.as_str()] {
            report.records_dropped_attention += 1;
            continue;
        }
        let slot = per_word
            .entry((r.category.as_str(), r.word.as_str()))
            .or_default();
        match r.rating {
            Some(v) => slot.1.push(v),
            None => slot.0 += 1,
        }
    }
    report.words_rated = per_word.len();
    if let Some(c) = candidates {
        report.words_dropped_no_ratings += c.total() - per_word.len();
    }

    let mut pooled: BTreeMap<(&str, String), (u64, u32)> = BTreeMap::new();
    for ((category, word), (unknown, ratings)) in &per_word {
        let total = unknown + ratings.len();
        if *unknown as f64 >= UNKNOWN_DROP_SHARE * total as f64 {
            report.words_dropped_unknown += 1;
            continue;
        }
        let Some(key) = normalize_key(word) else {
            report.words_dropped_no_key += 1;
            continue;
        };
        let slot = pooled.entry((category, key)).or_default();
        slot.0 += ratings.iter().map(|&v| u64::from(v)).sum::<u64>();
        slot.1 += ratings.len() as u32;
    }

    let mut categories: Vec<String> = Vec::new();
    match candidates {
        Some(c) => categories.extend(c.categories.iter().map(|(name, _)| name.clone())),
        None => {
            let seen: BTreeSet<&String> = records.iter().map(|r| &r.category).collect();
            categories.extend(seen.into_iter().cloned());
        }
    }
    let entries: Vec<LexiconEntry> = pooled
        .into_iter()
        .map(|((category, key), (sum, n))| {
            let mean = (sum as f64 / f64::from(n) * 1e6).round() / 1e6;
            LexiconEntry::new(key, category, mean, n)
        })
        .collect();
    if entries.is_empty() {
        return Err(Error::Build(
            "no candidate survived rating ingestion".into(),
        ));
    }
    report.final_stems = entries.len();
    let lexicon = Lexicon::new(categories, entries, "weighted", None)?;
    Ok((lexicon, report))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryCounts {
    pub category: String,
    pub seeds: usize,
    pub post_synonym: usize,
    pub post_embedding: usize,
    pub post_dedup: usize,
    pub final_stems: usize,
}

/// Counts at every pipeline stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildReport {
    pub seeds: usize,
    /// Seeds plus synonym additions, deduplicated per category.
    pub post_synonym: usize,
    /// `post_synonym` plus every embedding neighbour, before deduplication.
    pub post_embedding: usize,
    pub post_dedup: usize,
    pub seeds_missing_synonyms: usize,
    pub seeds_missing_embeddings: usize,
    pub neighbours: usize,
    pub ingest: IngestReport,
    pub final_stems: usize,
    /// Entry count of each thresholded version, keyed by threshold.
    pub thresholded: BTreeMap<String, usize>,
    pub per_category: Vec<CategoryCounts>,
}

pub struct BuildInputs<'a> {
    pub seeds: &'a [SeedList],
    pub synonyms: Option<&'a SynonymProvider>,
    pub embeddings: Option<&'a EmbeddingTable>,
    pub neighbours: usize,
    pub ratings: &'a [RatingRecord],
}

pub struct BuildOutput {
    pub candidates: CandidateSet,
    pub weighted: Lexicon,
    /// `(threshold, lexicon)` for each of [`BUILD_THRESHOLDS`].
    pub thresholded: Vec<(f64, Lexicon)>,
    pub report: BuildReport,
}

pub fn build(inputs: &BuildInputs<'_>) -> Result<BuildOutput> {
    let empty = SynonymProvider::default();
    let provider = inputs.synonyms.unwrap_or(&empty);
    let mut lists = Vec::with_capacity(inputs.seeds.len());
    let mut per_category = Vec::with_capacity(inputs.seeds.len());
    let (mut missing_syn, mut missing_emb, mut neighbours) = (0, 0, 0);
    for seeds in inputs.seeds {
        let syn = expand_synonyms(seeds, provider);
        missing_syn += syn.missing;
        let emb = match inputs.embeddings {
            Some(table) => expand_embeddings(seeds, table, inputs.neighbours)?,
            None => Expansion {
                words: Vec::new(),
                missing: 0,
            },
        };
        missing_emb += emb.missing;
        neighbours += emb.words.len();
        per_category.push(CategoryCounts {
            category: seeds.category.clone(),
            seeds: seeds.words.len(),
            post_synonym: syn.words.len(),
            post_embedding: syn.words.len() + emb.words.len(),
            post_dedup: 0,
            final_stems: 0,
        });
        let mut words = syn.words;
        words.extend(emb.words);
        lists.push((seeds.category.clone(), words));
    }
    let candidates = merge_candidates(lists);
    for (counts, (_, words)) in per_category.iter_mut().zip(&candidates.categories) {
        counts.post_dedup = words.len();
    }

    let (weighted, ingest) = ingest_ratings(inputs.ratings, Some(&candidates))?;
    for counts in &mut per_category {
        counts.final_stems = weighted.entries_in(&counts.category).count();
    }
    let thresholded = BUILD_THRESHOLDS
        .iter()
        .map(|&t| weighted.filter_by_threshold(t, false).map(|l| (t, l)))
        .collect::<Result<Vec<_>>>()?;

    let sum = |f: fn(&CategoryCounts) -> usize| per_category.iter().map(f).sum();
    let report = BuildReport {
        seeds: sum(|c| c.seeds),
        post_synonym: sum(|c| c.post_synonym),
        post_embedding: sum(|c| c.post_embedding),
        post_dedup: candidates.total(),
        seeds_missing_synonyms: missing_syn,
        seeds_missing_embeddings: missing_emb,
        neighbours,
        final_stems: weighted.len(),
        ingest,
        thresholded: thresholded
            .iter()
            .map(|(t, l)| (format!("{t}"), l.len()))
            .collect(),
        per_category,
    };
    Ok(BuildOutput {
        candidates,
        weighted,
        thresholded,
        report,
    })
}

pub fn write_build_report(
    report: &BuildReport,
    config: &serde_json::Value,
    path: &Path,
) -> Result<()> {
    let doc = serde_json::json!({ "config": config, "report": report });
    let text = serde_json::to_string_pretty(&doc).expect("report serializes");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// `category<TAB>word` per candidate, the layout of the seeds file.
pub fn write_candidates(candidates: &CandidateSet, path: &Path, preamble: &[String]) -> Result<()> {
    let mut out = String::new();
    for line in preamble {
        out.push_str(&format!("# {line}\n"));
    }
    for (category, words) in &candidates.categories {
        for w in words {
            out.push_str(&format!("{category}\t{w}\n"));
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
