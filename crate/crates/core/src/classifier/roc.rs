use std::path::Path;

use super::FeatureTable;
use crate::error::{Error, Result};
use crate::report::{fixed6, write_csv};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureImportance {
    pub feature: String,
    pub auc: f64,
    /// `max(auc, 1 - auc)`
    pub importance: f64,
    /// 1-based
    pub rank: usize,
}

/// Midranks (1-based) of `values`; ties share the mean of their positions.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Area under the ROC curve of `scores` against `labels` (true = positive),
/// from the Mann–Whitney U of the positive class.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Argument("AUC needs both classes".into()));
    }
    let ranks = midranks(scores);
    let rank_sum: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(r, _)| r)
        .sum();
    let (p, n) = (n_pos as f64, n_neg as f64);
    let u = rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * n))
}

/// Features ranked by direction-free AUC, ties broken by name.
pub fn roc_importance(table: &FeatureTable) -> Result<Vec<FeatureImportance>> {
    let mut out = Vec::with_capacity(table.n_features());
    for (j, name) in table.features.iter().enumerate() {
        let a = auc(&table.column(j), &table.labels)?;
        out.push(FeatureImportance {
            feature: name.clone(),
            auc: a,
            importance: a.max(1.0 - a),
            rank: 0,
        });
    }
    out.sort_by(|x, y| {
        y.importance
            .total_cmp(&x.importance)
            .then_with(|| x.feature.cmp(&y.feature))
    });
    for (i, f) in out.iter_mut().enumerate() {
        f.rank = i + 1;
    }
    Ok(out)
}

pub const IMPORTANCE_HEADER: [&str; 4] = ["feature", "auc", "importance", "rank"];

pub fn write_importance_csv(
    ranked: &[FeatureImportance],
    path: &Path,
    preamble: &[String],
) -> Result<()> {
    let rows = ranked.iter().map(|f| {
        vec![
            f.feature.clone(),
            fixed6(f.auc),
            fixed6(f.importance),
            f.rank.to_string(),
        ]
    });
    write_csv(path, preamble, &IMPORTANCE_HEADER, rows)
}
