//! Gaussian Naive Bayes over dictionary scores, evaluation metrics, the
//! down-sampling bootstrap and ROC-based feature importance.

mod features;
mod roc;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::{fixed6_or_blank, write_csv};
use crate::sampling::{stream_rng, subsample};
use crate::stats::{mean, sample_variance};

pub use features::{
    assemble_features, join_score_tables, ClassScores, FeatureSet, FeatureTable, EXTERNAL_PREFIX,
};
pub use roc::{
    auc, midranks, roc_importance, write_importance_csv, FeatureImportance, IMPORTANCE_HEADER,
};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;
/// Variance floor as a fraction of the largest feature variance.
pub const VAR_SMOOTHING: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassParams {
    pub prior: f64,
    pub means: Vec<f64>,
    /// Sample variances plus the floor.
    pub variances: Vec<f64>,
}

impl ClassParams {
    fn log_joint(&self, row: &[f64]) -> f64 {
        let mut lp = self.prior.ln();
        for ((x, m), v) in row.iter().zip(&self.means).zip(&self.variances) {
            lp += -0.5 * (2.0 * PI * v).ln() - (x - m) * (x - m) / (2.0 * v);
        }
        lp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GnbModel {
    pub features: Vec<String>,
    pub positive: ClassParams,
    pub negative: ClassParams,
    pub variance_floor: f64,
}

/// Fits per-class priors, means and sample variances (`n - 1`).
///
/// The floor is `VAR_SMOOTHING` times the largest whole-table feature
/// variance, or `VAR_SMOOTHING` itself when every feature is constant.
pub fn gnb_fit(table: &FeatureTable) -> Result<GnbModel> {
    let (n_pos, n_neg) = table.class_counts();
    if n_pos < 2 || n_neg < 2 {
        return Err(Error::Training(format!(
            "need at least 2 rows per class, have {n_pos} positive and {n_neg} negative"
        )));
    }
    let columns: Vec<Vec<f64>> = (0..table.n_features()).map(|j| table.column(j)).collect();
    let max_var = columns
        .iter()
        .map(|c| sample_variance(c))
        .fold(0.0, f64::max);
    let floor = if max_var > 0.0 {
        VAR_SMOOTHING * max_var
    } else {
        VAR_SMOOTHING
    };
    let n = table.len() as f64;
    let params = |positive: bool, count: usize| {
        let idx = table.class_indices(positive);
        let (means, variances) = columns
            .iter()
            .map(|c| {
                let xs: Vec<f64> = idx.iter().map(|&i| c[i]).collect();
                (mean(&xs), sample_variance(&xs) + floor)
            })
            .unzip();
        ClassParams {
            prior: count as f64 / n,
            means,
            variances,
        }
    };
    Ok(GnbModel {
        features: table.features.clone(),
        positive: params(true, n_pos),
        negative: params(false, n_neg),
        variance_floor: floor,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub positive: bool,
    /// Unnormalised log posterior (log prior + log likelihood) per class.
    pub log_posterior_positive: f64,
    pub log_posterior_negative: f64,
}

impl GnbModel {
    /// Prediction for a row already in model feature order. Ties go to the
    /// positive class.
    fn predict_aligned(&self, row: &[f64]) -> Prediction {
        let lp = self.positive.log_joint(row);
        let ln = self.negative.log_joint(row);
        Prediction {
            positive: lp >= ln,
            log_posterior_positive: lp,
            log_posterior_negative: ln,
        }
    }
}

/// Predicts a row given as parallel name/value slices, in any order.
pub fn gnb_predict(model: &GnbModel, names: &[String], values: &[f64]) -> Result<Prediction> {
    if names.len() != values.len() {
        return Err(Error::Argument(format!(
            "{} names for {} values",
            names.len(),
            values.len()
        )));
    }
    let given: HashMap<&str, f64> = names
        .iter()
        .map(String::as_str)
        .zip(values.iter().copied())
        .collect();
    let row = model
        .features
        .iter()
        .map(|f| {
            given
                .get(f.as_str())
                .copied()
                .ok_or_else(|| Error::Argument(format!("row lacks feature {f:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(model.predict_aligned(&row))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

/// Metrics with `None` wherever the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub confusion: Confusion,
    pub accuracy: Option<f64>,
    pub specificity: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl Metrics {
    pub fn from_confusion(c: Confusion) -> Self {
        Metrics {
            confusion: c,
            accuracy: ratio(c.tp + c.tn, c.tp + c.fp + c.tn + c.fn_),
            specificity: ratio(c.tn, c.tn + c.fp),
            precision: ratio(c.tp, c.tp + c.fp),
            recall: ratio(c.tp, c.tp + c.fn_),
        }
    }
}

fn check_schema(model: &GnbModel, table: &FeatureTable) -> Result<()> {
    if model.features != table.features {
        return Err(Error::Argument(
            "feature columns differ from the model's (names and order must match)".into(),
        ));
    }
    Ok(())
}

pub fn evaluate(model: &GnbModel, test: &FeatureTable) -> Result<Metrics> {
    check_schema(model, test)?;
    if test.is_empty() {
        return Err(Error::Argument("empty test table".into()));
    }
    let mut c = Confusion::default();
    for (row, &truth) in test.rows.iter().zip(&test.labels) {
        match (model.predict_aligned(row).positive, truth) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(Metrics::from_confusion(c))
}

/// Trains on all of `train`, evaluates on all of `test`.
pub fn cross_sample_classify(train: &FeatureTable, test: &FeatureTable) -> Result<Metrics> {
    if train.features != test.features {
        return Err(Error::Argument(
            "train and test tables have different feature columns".into(),
        ));
    }
    evaluate(&gnb_fit(train)?, test)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub iterations: usize,
    pub seed: u64,
    pub train_fraction: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            iterations: crate::inferstats::DEFAULT_ITERATIONS,
            seed: crate::inferstats::DEFAULT_SEED,
            train_fraction: DEFAULT_TRAIN_FRACTION,
        }
    }
}

/// Mean of one metric across iterations where it was defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricMean {
    pub mean: Option<f64>,
    pub undefined: usize,
}

impl MetricMean {
    fn over(values: impl Iterator<Item = Option<f64>>) -> Self {
        let mut defined = Vec::new();
        let mut undefined = 0;
        for v in values {
            match v {
                Some(x) => defined.push(x),
                None => undefined += 1,
            }
        }
        MetricMean {
            mean: (!defined.is_empty()).then(|| mean(&defined)),
            undefined,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub accuracy: MetricMean,
    pub specificity: MetricMean,
    pub precision: MetricMean,
    pub recall: MetricMean,
    pub iterations: usize,
    pub seed: Option<u64>,
}

impl ClassificationReport {
    pub fn from_runs(runs: &[Metrics], seed: Option<u64>) -> Self {
        ClassificationReport {
            accuracy: MetricMean::over(runs.iter().map(|m| m.accuracy)),
            specificity: MetricMean::over(runs.iter().map(|m| m.specificity)),
            precision: MetricMean::over(runs.iter().map(|m| m.precision)),
            recall: MetricMean::over(runs.iter().map(|m| m.recall)),
            iterations: runs.len(),
            seed,
        }
    }
}

/// Training rows per class: `round(fraction * n)`, kept within `[2, n - 1]`
/// so both classes can be fitted and tested.
fn train_count(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64).round() as usize).clamp(2, n - 1)
}

/// Down-samples the negative class to the positive class size, splits each
/// class into train and test, fits and evaluates; once per iteration.
pub fn bootstrap_classify(
    table: &FeatureTable,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    if opts.iterations == 0 {
        return Err(Error::Argument("iterations must be at least 1".into()));
    }
    if !(opts.train_fraction > 0.0 && opts.train_fraction < 1.0) {
        return Err(Error::Argument(format!(
            "train fraction {} outside (0, 1)",
            opts.train_fraction
        )));
    }
    let pos = table.class_indices(true);
    let neg = table.class_indices(false);
    if neg.len() < pos.len() {
        return Err(Error::Argument(format!(
            "control has {} rows, fewer than the {} target rows",
            neg.len(),
            pos.len()
        )));
    }
    if pos.len() < 3 {
        return Err(Error::Argument(format!(
            "target has {} rows, need at least 3 to train and test",
            pos.len()
        )));
    }
    let n_train = train_count(pos.len(), opts.train_fraction);

    let runs: Vec<Metrics> = (0..opts.iterations)
        .into_par_iter()
        .map(|it| {
            let mut rng = stream_rng(opts.seed, it as u64);
            let mut negatives: Vec<usize> = subsample(neg.len(), pos.len(), &mut rng)
                .into_iter()
                .map(|i| neg[i])
                .collect();
            let mut positives = pos.clone();
            positives.shuffle(&mut rng);
            negatives.shuffle(&mut rng);
            let mut train_idx = positives[..n_train].to_vec();
            train_idx.extend_from_slice(&negatives[..n_train]);
            let mut test_idx = positives[n_train..].to_vec();
            test_idx.extend_from_slice(&negatives[n_train..]);
            let model = gnb_fit(&table.select(&train_idx))?;
            evaluate(&model, &table.select(&test_idx))
        })
        .collect::<Result<_>>()?;
    Ok(ClassificationReport::from_runs(&runs, Some(opts.seed)))
}

pub const METRICS_HEADER: [&str; 8] = [
    "task",
    "feature_set",
    "accuracy",
    "specificity",
    "precision",
    "recall",
    "iterations",
    "seed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub task: String,
    pub feature_set: String,
    pub report: ClassificationReport,
}

pub fn write_metrics_csv(rows: &[MetricsRow], path: &Path, preamble: &[String]) -> Result<()> {
    let records = rows.iter().map(|r| {
        vec![
            r.task.clone(),
            r.feature_set.clone(),
            fixed6_or_blank(r.report.accuracy.mean),
            fixed6_or_blank(r.report.specificity.mean),
            fixed6_or_blank(r.report.precision.mean),
            fixed6_or_blank(r.report.recall.mean),
            r.report.iterations.to_string(),
            r.report.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]
    });
    write_csv(path, preamble, &METRICS_HEADER, records)
}
