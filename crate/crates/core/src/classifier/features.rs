use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scorer::ScoreTable;

/// Prefix given to external feature names that collide with grievance ones.
pub const EXTERNAL_PREFIX: &str = "ext_";

/// Rows of feature values with a binary label; `true` is the target class.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub doc_ids: Vec<String>,
    pub features: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

impl FeatureTable {
    pub fn new(
        doc_ids: Vec<String>,
        features: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<bool>,
    ) -> Result<Self> {
        if doc_ids.len() != rows.len() || labels.len() != rows.len() {
            return Err(Error::Argument(format!(
                "{} ids, {} rows and {} labels",
                doc_ids.len(),
                rows.len(),
                labels.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = features.iter().find(|f| !seen.insert(f.as_str())) {
            return Err(Error::Argument(format!("duplicate feature {dup:?}")));
        }
        for (id, row) in doc_ids.iter().zip(&rows) {
            if row.len() != features.len() {
                return Err(Error::Argument(format!(
                    "row {id:?} has {} values for {} features",
                    row.len(),
                    features.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Argument(format!(
                    "row {id:?} has a non-finite value"
                )));
            }
        }
        Ok(FeatureTable {
            doc_ids,
            features,
            rows,
            labels,
        })
    }

    /// Target documents labelled positive, control documents negative.
    /// Control columns are matched to the target's by name.
    pub fn from_score_tables(target: &ScoreTable, control: &ScoreTable) -> Result<Self> {
        let mut names_t: Vec<&String> = target.categories.iter().collect();
        let mut names_c: Vec<&String> = control.categories.iter().collect();
        names_t.sort();
        names_c.sort();
        if names_t != names_c {
            return Err(Error::Argument(
                "target and control tables have different columns".into(),
            ));
        }
        let order: Vec<usize> = target
            .categories
            .iter()
            .map(|c| control.category_index(c).expect("same column set"))
            .collect();
        let mut doc_ids = Vec::with_capacity(target.len() + control.len());
        let mut rows = Vec::with_capacity(target.len() + control.len());
        let mut labels = Vec::with_capacity(target.len() + control.len());
        for p in &target.profiles {
            doc_ids.push(p.doc_id.clone());
            rows.push(p.scores.clone());
            labels.push(true);
        }
        for p in &control.profiles {
            doc_ids.push(p.doc_id.clone());
            rows.push(order.iter().map(|&j| p.scores[j]).collect());
            labels.push(false);
        }
        FeatureTable::new(doc_ids, target.categories.clone(), rows, labels)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    /// (positives, negatives)
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l).count();
        (pos, self.labels.len() - pos)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn select(&self, idx: &[usize]) -> FeatureTable {
        FeatureTable {
            doc_ids: idx.iter().map(|&i| self.doc_ids[i].clone()).collect(),
            features: self.features.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Row indices of one class, in table order.
    pub fn class_indices(&self, positive: bool) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.labels[i] == positive)
            .collect()
    }
}

/// Column union of two score tables over the same documents (joined by id).
/// Names from `external` that already exist in `base` get [`EXTERNAL_PREFIX`].
pub fn join_score_tables(base: &ScoreTable, external: &ScoreTable) -> Result<ScoreTable> {
    if base.len() != external.len() {
        return Err(Error::Argument(format!(
            "cannot join tables of {} and {} documents",
            base.len(),
            external.len()
        )));
    }
    let ext_rows: HashMap<&str, usize> = external
        .profiles
        .iter()
        .enumerate()
        .map(|(i, p)| (p.doc_id.as_str(), i))
        .collect();
    let mut categories = base.categories.clone();
    for c in &external.categories {
        let name = if base.categories.contains(c) {
            format!("{EXTERNAL_PREFIX}{c}")
        } else {
            c.clone()
        };
        if categories.contains(&name) {
            return Err(Error::Argument(format!(
                "feature name {name:?} occurs twice after joining"
            )));
        }
        categories.push(name);
    }
    let mut profiles = Vec::with_capacity(base.len());
    for p in &base.profiles {
        let &row = ext_rows.get(p.doc_id.as_str()).ok_or_else(|| {
            Error::Argument(format!("doc id {:?} missing from external table", p.doc_id))
        })?;
        let mut joined = p.clone();
        joined
            .scores
            .extend_from_slice(&external.profiles[row].scores);
        joined.match_counts.clear();
        profiles.push(joined);
    }
    Ok(ScoreTable {
        mode: base.mode,
        categories,
        profiles,
    })
}

/// Which score columns feed the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSet {
    Grievance,
    External,
    Both,
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureSet::Grievance => "grievance",
            FeatureSet::External => "external",
            FeatureSet::Both => "both",
        })
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grievance" => Ok(FeatureSet::Grievance),
            "external" => Ok(FeatureSet::External),
            "both" => Ok(FeatureSet::Both),
            _ => Err(Error::Argument(format!(
                "unknown feature set {s:?} (grievance, external, both)"
            ))),
        }
    }
}

/// Score tables for one class: grievance scores and optional external scores.
#[derive(Debug, Clone, Copy)]
pub struct ClassScores<'a> {
    pub grievance: Option<&'a ScoreTable>,
    pub external: Option<&'a ScoreTable>,
}

impl<'a> ClassScores<'a> {
    fn resolve(&self, set: FeatureSet, role: &str) -> Result<ScoreTable> {
        let missing = |what: &str| {
            Error::Argument(format!(
                "feature set {set} needs {what} scores for the {role} class"
            ))
        };
        match set {
            FeatureSet::Grievance => self.grievance.cloned().ok_or_else(|| missing("grievance")),
            FeatureSet::External => self.external.cloned().ok_or_else(|| missing("external")),
            FeatureSet::Both => join_score_tables(
                self.grievance.ok_or_else(|| missing("grievance"))?,
                self.external.ok_or_else(|| missing("external"))?,
            ),
        }
    }
}

/// Builds the labelled feature table for a feature-set configuration.
pub fn assemble_features(
    set: FeatureSet,
    target: ClassScores<'_>,
    control: ClassScores<'_>,
) -> Result<FeatureTable> {
    FeatureTable::from_score_tables(
        &target.resolve(set, "target")?,
        &control.resolve(set, "control")?,
    )
}
