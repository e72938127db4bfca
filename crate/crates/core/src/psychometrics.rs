//! Internal consistency of lexicon categories and cross-lexicon correlations.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::report::{fixed6, fixed6_or_blank, write_csv};
use crate::scorer::{ScoreTable, Scorer, WordOccurrenceMatrix};
use crate::stats::{is_constant, mean, sample_variance};
use crate::textprep::Corpus;

/// z quantile used for 95% intervals.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha {
    pub value: f64,
    pub items_used: usize,
    pub items_dropped: usize,
}

/// Raw Cronbach's alpha over the matrix columns.
///
/// Columns with zero variance are dropped first; `N - 1` variances.
pub fn cronbach_alpha(matrix: &WordOccurrenceMatrix) -> Result<Alpha> {
    let n = matrix.n_rows();
    if n < 2 {
        return Err(Error::UndefinedAlpha(format!("{n} rows, need at least 2")));
    }
    let columns: Vec<Vec<f64>> = (0..matrix.n_cols())
        .map(|j| matrix.column(j))
        .filter(|col| !is_constant(col))
        .collect();
    let k = columns.len();
    let dropped = matrix.n_cols() - k;
    if k < 2 {
        return Err(Error::UndefinedAlpha(format!(
            "{k} non-constant items after dropping {dropped}"
        )));
    }
    let item_var_sum: f64 = columns.iter().map(|c| sample_variance(c)).sum();
    let totals: Vec<f64> = (0..n).map(|i| columns.iter().map(|c| c[i]).sum()).collect();
    if is_constant(&totals) {
        return Err(Error::UndefinedAlpha(
            "row totals have zero variance".into(),
        ));
    }
    let total_var = sample_variance(&totals);
    let kf = k as f64;
    Ok(Alpha {
        value: kf / (kf - 1.0) * (1.0 - item_var_sum / total_var),
        items_used: k,
        items_dropped: dropped,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusAlpha {
    pub corpus: String,
    pub alpha: Option<f64>,
    pub items_used: usize,
    pub items_dropped: usize,
    /// Why alpha is undefined, when it is.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReport {
    pub category: String,
    pub per_corpus: Vec<CorpusAlpha>,
    /// Unweighted mean over corpora with a defined alpha.
    pub mean_alpha: Option<f64>,
}

impl AlphaReport {
    pub fn items_dropped_total(&self) -> usize {
        self.per_corpus.iter().map(|c| c.items_dropped).sum()
    }
}

/// Per-document sparse occurrence counts: `(entry index, count)`.
type SparseCounts = Vec<(u32, u32)>;

fn category_matrix(
    lex: &Lexicon,
    corpus: &Corpus,
    counts: &[SparseCounts],
    entry_ids: &[usize],
    category: &str,
) -> WordOccurrenceMatrix {
    let column_of: HashMap<usize, usize> =
        entry_ids.iter().enumerate().map(|(j, &e)| (e, j)).collect();
    let rows = corpus
        .docs
        .iter()
        .zip(counts)
        .map(|(doc, sparse)| {
            let mut row = vec![0.0; entry_ids.len()];
            let n = doc.token_count();
            if n > 0 {
                for &(entry, count) in sparse {
                    if let Some(&j) = column_of.get(&(entry as usize)) {
                        row[j] = f64::from(count) / n as f64;
                    }
                }
            }
            row
        })
        .collect();
    WordOccurrenceMatrix {
        category: category.to_string(),
        doc_ids: corpus.docs.iter().map(|d| d.id.clone()).collect(),
        keys: entry_ids
            .iter()
            .map(|&e| lex.entries()[e].key.clone())
            .collect(),
        rows,
    }
}

/// Alpha per category and corpus, then the mean across corpora.
///
/// An empty `categories` slice means every lexicon category.
pub fn alpha_suite(
    corpora: &[Corpus],
    lex: &Lexicon,
    categories: &[String],
) -> Result<Vec<AlphaReport>> {
    if corpora.is_empty() {
        return Err(Error::Argument("at least one corpus is required".into()));
    }
    let selected: Vec<String> = if categories.is_empty() {
        lex.categories().to_vec()
    } else {
        for c in categories {
            if lex.category_index(c).is_none() {
                return Err(Error::Argument(format!("unknown category {c:?}")));
            }
        }
        categories.to_vec()
    };
    let scorer = Scorer::new(lex);
    let mut reports: Vec<AlphaReport> = selected
        .iter()
        .map(|c| AlphaReport {
            category: c.clone(),
            per_corpus: Vec::with_capacity(corpora.len()),
            mean_alpha: None,
        })
        .collect();

    for corpus in corpora {
        let counts: Vec<SparseCounts> = corpus
            .docs
            .par_iter()
            .map(|doc| {
                scorer
                    .entry_counts(doc)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| *c > 0)
                    .map(|(e, c)| (e as u32, c))
                    .collect()
            })
            .collect();
        let cells: Vec<CorpusAlpha> = selected
            .par_iter()
            .map(|category| {
                let entry_ids: Vec<usize> = lex
                    .entries()
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| &e.category == category)
                    .map(|(i, _)| i)
                    .collect();
                let matrix = category_matrix(lex, corpus, &counts, &entry_ids, category);
                match cronbach_alpha(&matrix) {
                    Ok(a) => CorpusAlpha {
                        corpus: corpus.name.clone(),
                        alpha: Some(a.value),
                        items_used: a.items_used,
                        items_dropped: a.items_dropped,
                        note: None,
                    },
                    Err(e) => {
                        let dropped = (0..matrix.n_cols())
                            .filter(|&j| is_constant(&matrix.column(j)))
                            .count();
                        CorpusAlpha {
                            corpus: corpus.name.clone(),
                            alpha: None,
                            items_used: matrix.n_cols() - dropped,
                            items_dropped: dropped,
                            note: Some(e.to_string()),
                        }
                    }
                }
            })
            .collect();
        for (report, cell) in reports.iter_mut().zip(cells) {
            report.per_corpus.push(cell);
        }
    }

    for report in &mut reports {
        let defined: Vec<f64> = report.per_corpus.iter().filter_map(|c| c.alpha).collect();
        report.mean_alpha = (!defined.is_empty()).then(|| mean(&defined));
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub r: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationPair {
    pub category_a: String,
    pub category_b: String,
    /// `None` when either column is constant.
    pub stats: Option<Correlation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub pairs: Vec<CorrelationPair>,
    pub bonferroni_threshold: f64,
    pub n: usize,
}

impl CorrelationPair {
    pub fn significant(&self, threshold: f64) -> bool {
        self.stats.is_some_and(|s| s.p < threshold)
    }
}

/// Pearson r with a Fisher-z 95% interval and a two-sided t-test p-value.
/// Returns `None` for a constant input.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<Correlation> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 4 || is_constant(x) || is_constant(y) {
        return None;
    }
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let nf = n as f64;
    if r.abs() == 1.0 {
        return Some(Correlation {
            r,
            ci_low: r,
            ci_high: r,
            p: 0.0,
        });
    }
    let z = r.atanh();
    let se = 1.0 / (nf - 3.0).sqrt();
    let t = r * ((nf - 2.0) / (1.0 - r * r)).sqrt();
    Some(Correlation {
        r,
        ci_low: (z - Z_95 * se).tanh().min(r),
        ci_high: (z + Z_95 * se).tanh().max(r),
        p: crate::stats::t_two_sided_p(t, nf - 2.0),
    })
}

/// Correlates every category of `a` with every category of `b` over shared
/// documents (joined by id).
pub fn cross_correlate(a: &ScoreTable, b: &ScoreTable) -> Result<CorrelationReport> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!(
            "tables hold {} and {} documents",
            a.len(),
            b.len()
        )));
    }
    let b_rows: HashMap<&str, usize> = b
        .profiles
        .iter()
        .enumerate()
        .map(|(i, p)| (p.doc_id.as_str(), i))
        .collect();
    let order: Vec<usize> = a
        .profiles
        .iter()
        .map(|p| {
            b_rows.get(p.doc_id.as_str()).copied().ok_or_else(|| {
                Error::Argument(format!("doc id {:?} missing from second table", p.doc_id))
            })
        })
        .collect::<Result<_>>()?;
    let n = a.len();
    if n < 4 {
        return Err(Error::Argument(format!("{n} documents, need at least 4")));
    }
    let mut pairs = Vec::with_capacity(a.categories.len() * b.categories.len());
    for (i, ca) in a.categories.iter().enumerate() {
        let x = a.column(i);
        for (j, cb) in b.categories.iter().enumerate() {
            let y: Vec<f64> = order.iter().map(|&row| b.profiles[row].scores[j]).collect();
            pairs.push(CorrelationPair {
                category_a: ca.clone(),
                category_b: cb.clone(),
                stats: pearson(&x, &y),
            });
        }
    }
    Ok(CorrelationReport {
        pairs,
        bonferroni_threshold: 0.05 / a.categories.len() as f64,
        n,
    })
}

/// `category,<corpus>...,mean_alpha,items_dropped_total`; undefined alphas
/// are empty cells.
pub fn write_alpha_csv(reports: &[AlphaReport], path: &Path, preamble: &[String]) -> Result<()> {
    let mut header = vec!["category"];
    if let Some(first) = reports.first() {
        header.extend(first.per_corpus.iter().map(|c| c.corpus.as_str()));
    }
    header.extend(["mean_alpha", "items_dropped_total"]);
    let rows = reports.iter().map(|r| {
        let mut row = vec![r.category.clone()];
        row.extend(r.per_corpus.iter().map(|c| fixed6_or_blank(c.alpha)));
        row.push(fixed6_or_blank(r.mean_alpha));
        row.push(r.items_dropped_total().to_string());
        row
    });
    write_csv(path, preamble, &header, rows)
}

pub const CORRELATION_HEADER: [&str; 7] = [
    "cat_a",
    "cat_b",
    "r",
    "ci_low",
    "ci_high",
    "p",
    "significant",
];

/// One row per category pair; `significant` uses the Bonferroni threshold.
pub fn write_correlation_csv(
    report: &CorrelationReport,
    path: &Path,
    preamble: &[String],
) -> Result<()> {
    let rows = report.pairs.iter().map(|pair| {
        let mut row = vec![pair.category_a.clone(), pair.category_b.clone()];
        match pair.stats {
            Some(s) => row.extend([
                fixed6(s.r),
                fixed6(s.ci_low),
                fixed6(s.ci_high),
                format!("{:.6e}", s.p),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
        row.push(pair.significant(report.bonferroni_threshold).to_string());
        row
    });
    write_csv(path, preamble, &CORRELATION_HEADER, rows)
}
