//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use grievlex::lexicon::{Lexicon, LexiconEntry};
use grievlex::scorer::{ScoreMode, ScoreProfile, ScoreTable};
use grievlex::textprep::stem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Short words are returned unchanged by the stemmer, so keys built from
/// them need no stemming.
pub const VOCAB: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
pub const CATEGORIES: [&str; 3] = ["c0", "c1", "c2"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_keys` random (key, category) entries, at least `min_phrases`
/// of them multi-word.
pub fn random_lexicon(r: &mut ChaCha8Rng, max_keys: usize, min_phrases: usize) -> Lexicon {
    let mut seen = std::collections::HashSet::new();
    let mut entries = Vec::new();
    let target = r.random_range(min_phrases.max(1)..=max_keys);
    while entries.len() < target {
        let phrase = entries
            .iter()
            .filter(|e: &&LexiconEntry| e.is_phrase())
            .count()
            < min_phrases;
        let len = if phrase {
            r.random_range(2..=3)
        } else {
            r.random_range(1..=3)
        };
        let key: Vec<&str> = (0..len).map(|_| VOCAB[r.random_range(0..4)]).collect();
        let key = key.join(" ");
        let category = CATEGORIES[r.random_range(0..CATEGORIES.len())];
        if seen.insert((key.clone(), category)) {
            let rating = r.random_range(0..=100) as f64 / 10.0;
            entries.push(LexiconEntry::new(
                key,
                category,
                rating,
                r.random_range(1..20),
            ));
        }
    }
    Lexicon::from_entries(entries, "random").unwrap()
}

pub fn random_tokens(r: &mut ChaCha8Rng, max_len: usize) -> Vec<String> {
    let n = r.random_range(0..=max_len);
    (0..n)
        .map(|_| VOCAB[r.random_range(0..VOCAB.len())].to_string())
        .collect()
}

/// Quadratic scan: per category, at each position take the longest key that
/// matches there, count it, and continue after it.
pub fn naive_matches(lex: &Lexicon, tokens: &[String]) -> BTreeMap<(String, String), u32> {
    let stems: Vec<String> = tokens.iter().map(|t| stem(t)).collect();
    let mut out = BTreeMap::new();
    for category in lex.categories() {
        let keys: Vec<Vec<&str>> = lex
            .entries_in(category)
            .map(|e| e.key.split(' ').collect())
            .collect();
        let mut i = 0;
        while i < stems.len() {
            let mut best: Option<&Vec<&str>> = None;
            for k in &keys {
                let fits =
                    i + k.len() <= stems.len() && k.iter().zip(&stems[i..]).all(|(a, b)| a == b);
                if fits && best.is_none_or(|b| k.len() > b.len()) {
                    best = Some(k);
                }
            }
            match best {
                Some(k) => {
                    *out.entry((category.clone(), k.join(" "))).or_insert(0) += 1;
                    i += k.len();
                }
                None => i += 1,
            }
        }
    }
    out
}

/// Alpha written out term by term.
pub fn alpha_oracle(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len() as f64;
    let k = rows[0].len();
    let var = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / n;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
    };
    let item_vars: f64 = (0..k)
        .map(|j| var(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .sum();
    let totals: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
    let kf = k as f64;
    kf / (kf - 1.0) * (1.0 - item_vars / var(&totals))
}

/// AUC by comparing every (positive, negative) pair, ties count one half.
pub fn auc_brute_force(values: &[f64], labels: &[bool]) -> f64 {
    let mut credit = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            pairs += 1.0;
            if values[i] > values[j] {
                credit += 1.0;
            } else if values[i] == values[j] {
                credit += 0.5;
            }
        }
    }
    credit / pairs
}

pub fn score_table(categories: &[String], ids: &[String], rows: Vec<Vec<f64>>) -> ScoreTable {
    ScoreTable {
        mode: ScoreMode::Proportional,
        categories: categories.to_vec(),
        profiles: ids
            .iter()
            .zip(rows)
            .map(|(id, scores)| ScoreProfile {
                doc_id: id.clone(),
                mode: ScoreMode::Proportional,
                token_count: 100,
                scores,
                match_counts: Vec::new(),
            })
            .collect(),
    }
}

/// Approximately standard normal draw (Box–Muller).
pub fn normal(r: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = r.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = r.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `n` synthetic proportion-like score rows over `k` categories.
pub fn synthetic_table(
    r: &mut ChaCha8Rng,
    prefix: &str,
    n: usize,
    k: usize,
    shift: f64,
) -> ScoreTable {
    let categories: Vec<String> = (0..k).map(|j| format!("cat{j}")).collect();
    let ids: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    let rows = (0..n)
        .map(|_| {
            (0..k)
                .map(|j| (0.02 + 0.005 * j as f64 + shift + 0.01 * normal(r)).max(0.0))
                .collect()
        })
        .collect();
    score_table(&categories, &ids, rows)
}
