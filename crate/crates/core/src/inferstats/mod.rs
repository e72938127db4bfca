//! Group comparisons: Welch t, Cohen's d, JZS Bayes factors and the
//! down-sampling bootstrap.

mod jzs;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::psychometrics::Z_95;
use crate::report::{fixed6, write_csv};
use crate::sampling::{stream_rng, subsample};
use crate::scorer::ScoreTable;
use crate::stats::{mean, percentile_sorted, sample_variance, t_two_sided_p};

pub use jzs::{jzs_bayes_factor, BayesFactor, TDesign, DEFAULT_BF_SCALE};

pub const DEFAULT_ITERATIONS: usize = 100;
pub const DEFAULT_SEED: u64 = 42;

/// Bayes factors above this are shown as `>10^3` in CSV output.
pub const BF_DISPLAY_CAP: f64 = 1e3;

pub const COMPARISON_HEADER: [&str; 10] = [
    "category",
    "d_mean",
    "d_lo",
    "d_hi",
    "t_mean",
    "bf10_mean",
    "ln_bf10_mean",
    "iterations",
    "seed",
    "degenerate_iterations",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    /// Sample SD (`n - 1` denominator).
    pub sd: f64,
}

impl SampleStats {
    pub fn new(n: usize, mean: f64, sd: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument(format!(
                "sample of size {n}, need at least 2"
            )));
        }
        if !(mean.is_finite() && sd.is_finite() && sd >= 0.0) {
            return Err(Error::Argument(format!(
                "bad sample summary mean={mean} sd={sd}"
            )));
        }
        Ok(SampleStats { n, mean, sd })
    }

    pub fn from_values(xs: &[f64]) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::Argument(format!(
                "sample of size {}, need at least 2",
                xs.len()
            )));
        }
        SampleStats::new(xs.len(), mean(xs), sample_variance(xs).sqrt())
    }

    fn var(&self) -> f64 {
        self.sd * self.sd
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Welch's unequal-variance t-test of `a - b`.
pub fn welch_t(a: &SampleStats, b: &SampleStats) -> Result<TTest> {
    let (na, nb) = (a.n as f64, b.n as f64);
    let (qa, qb) = (a.var() / na, b.var() / nb);
    let se2 = qa + qb;
    if se2 == 0.0 {
        if a.mean == b.mean {
            return Ok(TTest {
                t: 0.0,
                df: na + nb - 2.0,
                p: 1.0,
            });
        }
        return Err(Error::Degenerate(format!(
            "both samples have zero variance but means differ ({} vs {})",
            a.mean, b.mean
        )));
    }
    let t = (a.mean - b.mean) / se2.sqrt();
    let df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    Ok(TTest {
        t,
        df,
        p: t_two_sided_p(t, df),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectSize {
    pub d: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EffectSize {
    fn with_se(d: f64, se: f64) -> Self {
        EffectSize {
            d,
            ci_low: d - Z_95 * se,
            ci_high: d + Z_95 * se,
        }
    }
}

/// Cohen's d of `a - b` with pooled SD and a normal-approximation 95% CI.
pub fn cohen_d(a: &SampleStats, b: &SampleStats) -> Result<EffectSize> {
    let (na, nb) = (a.n as f64, b.n as f64);
    let pooled = (((na - 1.0) * a.var() + (nb - 1.0) * b.var()) / (na + nb - 2.0)).sqrt();
    if pooled == 0.0 {
        return Err(Error::Degenerate("pooled SD is zero".into()));
    }
    let d = (a.mean - b.mean) / pooled;
    let se = ((na + nb) / (na * nb) + d * d / (2.0 * (na + nb))).sqrt();
    Ok(EffectSize::with_se(d, se))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedTest {
    pub test: TTest,
    pub effect: EffectSize,
}

/// Paired t-test and d = mean/sd over the differences.
///
/// All-zero differences give t = d = 0; constant non-zero differences are
/// degenerate.
pub fn paired_t(diffs: &[f64]) -> Result<PairedTest> {
    let s = SampleStats::from_values(diffs)?;
    let n = s.n as f64;
    if s.sd == 0.0 {
        if s.mean == 0.0 {
            return Ok(PairedTest {
                test: TTest {
                    t: 0.0,
                    df: n - 1.0,
                    p: 1.0,
                },
                effect: EffectSize::with_se(0.0, (1.0 / n).sqrt()),
            });
        }
        return Err(Error::Degenerate(format!(
            "differences are constant ({})",
            s.mean
        )));
    }
    let t = s.mean / (s.sd / n.sqrt());
    let d = s.mean / s.sd;
    let se = (1.0 / n + d * d / (2.0 * n)).sqrt();
    Ok(PairedTest {
        test: TTest {
            t,
            df: n - 1.0,
            p: t_two_sided_p(t, n - 1.0),
        },
        effect: EffectSize::with_se(d, se),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparisonDesign {
    IndependentBootstrap,
    Paired,
}

impl fmt::Display for ComparisonDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComparisonDesign::IndependentBootstrap => "independent-bootstrap",
            ComparisonDesign::Paired => "paired",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonSummary {
    pub d_mean: f64,
    pub d_low: f64,
    pub d_high: f64,
    pub t_mean: f64,
    pub bf_mean: f64,
    pub bf_log_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub category: String,
    pub design: ComparisonDesign,
    pub iterations: usize,
    /// `None` for the paired design, which draws nothing.
    pub seed: Option<u64>,
    /// Iterations where the category had no usable variance.
    pub degenerate_iterations: usize,
    /// `None` when every iteration was degenerate.
    pub summary: Option<ComparisonSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapOptions {
    pub iterations: usize,
    pub seed: u64,
    pub bf_scale: f64,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            iterations: DEFAULT_ITERATIONS,
            seed: DEFAULT_SEED,
            bf_scale: DEFAULT_BF_SCALE,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Draw {
    d: f64,
    t: f64,
    bf: BayesFactor,
}

fn independent_draw(a: &SampleStats, b: &SampleStats, scale: f64) -> Result<Draw> {
    let test = welch_t(a, b)?;
    let effect = cohen_d(a, b)?;
    let bf = jzs_bayes_factor(test.t, TDesign::TwoSample { na: a.n, nb: b.n }, scale)?;
    Ok(Draw {
        d: effect.d,
        t: test.t,
        bf,
    })
}

fn is_degenerate(e: &Error) -> bool {
    matches!(e, Error::Degenerate(_))
}

/// Category columns of `b` in the order of `a`'s categories.
fn aligned_columns(a: &ScoreTable, b: &ScoreTable) -> Result<Vec<usize>> {
    a.categories
        .iter()
        .map(|c| {
            b.category_index(c)
                .ok_or_else(|| Error::Argument(format!("category {c:?} missing from second table")))
        })
        .collect()
}

/// Compares `target` with `control` subsampled to `target`'s size, once per
/// iteration, and averages the per-iteration statistics.
pub fn bootstrap_compare(
    target: &ScoreTable,
    control: &ScoreTable,
    opts: &BootstrapOptions,
) -> Result<Vec<ComparisonReport>> {
    if opts.iterations == 0 {
        return Err(Error::Argument("iterations must be at least 1".into()));
    }
    if target.len() < 2 {
        return Err(Error::Argument(format!(
            "target has {} documents, need at least 2",
            target.len()
        )));
    }
    if control.len() < target.len() {
        return Err(Error::Argument(format!(
            "control has {} documents, fewer than the {} in target",
            control.len(),
            target.len()
        )));
    }
    let columns = aligned_columns(target, control)?;
    let target_stats: Vec<SampleStats> = (0..target.categories.len())
        .map(|j| SampleStats::from_values(&target.column(j)))
        .collect::<Result<_>>()?;

    let draws: Vec<Vec<Result<Draw>>> = (0..opts.iterations)
        .into_par_iter()
        .map(|it| {
            let rows = subsample(
                control.len(),
                target.len(),
                &mut stream_rng(opts.seed, it as u64),
            );
            columns
                .iter()
                .zip(&target_stats)
                .map(|(&jc, ts)| {
                    let values: Vec<f64> = rows
                        .iter()
                        .map(|&r| control.profiles[r].scores[jc])
                        .collect();
                    independent_draw(ts, &SampleStats::from_values(&values)?, opts.bf_scale)
                })
                .collect()
        })
        .collect();

    let n_cat = target.categories.len();
    let mut kept: Vec<Vec<Draw>> = vec![Vec::with_capacity(opts.iterations); n_cat];
    let mut degenerate = vec![0usize; n_cat];
    for iteration in draws {
        for (j, draw) in iteration.into_iter().enumerate() {
            match draw {
                Ok(draw) => kept[j].push(draw),
                Err(e) if is_degenerate(&e) => degenerate[j] += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(target
        .categories
        .iter()
        .enumerate()
        .map(|(j, category)| ComparisonReport {
            category: category.clone(),
            design: ComparisonDesign::IndependentBootstrap,
            iterations: opts.iterations,
            seed: Some(opts.seed),
            degenerate_iterations: degenerate[j],
            summary: summarize(&kept[j]),
        })
        .collect())
}

fn summarize(draws: &[Draw]) -> Option<ComparisonSummary> {
    if draws.is_empty() {
        return None;
    }
    let ds: Vec<f64> = draws.iter().map(|x| x.d).collect();
    let mut sorted = ds.clone();
    sorted.sort_by(f64::total_cmp);
    Some(ComparisonSummary {
        d_mean: mean(&ds),
        d_low: percentile_sorted(&sorted, 0.025),
        d_high: percentile_sorted(&sorted, 0.975),
        t_mean: mean(&draws.iter().map(|x| x.t).collect::<Vec<_>>()),
        bf_mean: mean(&draws.iter().map(|x| x.bf.bf10).collect::<Vec<_>>()),
        bf_log_mean: mean(&draws.iter().map(|x| x.bf.ln_bf10).collect::<Vec<_>>()),
    })
}

/// Dependent-samples comparison of `a - b`, documents paired by id.
pub fn paired_compare(
    a: &ScoreTable,
    b: &ScoreTable,
    bf_scale: f64,
) -> Result<Vec<ComparisonReport>> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!(
            "paired tables hold {} and {} documents",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Argument(
            "paired comparison needs at least 2 pairs".into(),
        ));
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
            b_rows
                .get(p.doc_id.as_str())
                .copied()
                .ok_or_else(|| Error::Argument(format!("doc id {:?} has no pair", p.doc_id)))
        })
        .collect::<Result<_>>()?;
    let columns = aligned_columns(a, b)?;

    let mut reports = Vec::with_capacity(a.categories.len());
    for (j, category) in a.categories.iter().enumerate() {
        let diffs: Vec<f64> = a
            .profiles
            .iter()
            .zip(&order)
            .map(|(p, &row)| p.scores[j] - b.profiles[row].scores[columns[j]])
            .collect();
        let (summary, degenerate) = match paired_t(&diffs) {
            Ok(pt) => {
                let bf =
                    jzs_bayes_factor(pt.test.t, TDesign::OneSample { n: diffs.len() }, bf_scale)?;
                let summary = ComparisonSummary {
                    d_mean: pt.effect.d,
                    d_low: pt.effect.ci_low,
                    d_high: pt.effect.ci_high,
                    t_mean: pt.test.t,
                    bf_mean: bf.bf10,
                    bf_log_mean: bf.ln_bf10,
                };
                (Some(summary), 0)
            }
            Err(e) if is_degenerate(&e) => (None, 1),
            Err(e) => return Err(e),
        };
        reports.push(ComparisonReport {
            category: category.clone(),
            design: ComparisonDesign::Paired,
            iterations: 1,
            seed: None,
            degenerate_iterations: degenerate,
            summary,
        });
    }
    Ok(reports)
}

fn format_bf(bf: f64) -> String {
    if bf > BF_DISPLAY_CAP {
        ">10^3".to_string()
    } else {
        fixed6(bf)
    }
}

pub fn write_comparison_csv(
    reports: &[ComparisonReport],
    path: &Path,
    preamble: &[String],
) -> Result<()> {
    let rows = reports.iter().map(|r| {
        let mut row = vec![r.category.clone()];
        match &r.summary {
            Some(s) => row.extend([
                fixed6(s.d_mean),
                fixed6(s.d_low),
                fixed6(s.d_high),
                fixed6(s.t_mean),
                format_bf(s.bf_mean),
                fixed6(s.bf_log_mean),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), 6)),
        }
        row.push(r.iterations.to_string());
        row.push(r.seed.map(|s| s.to_string()).unwrap_or_default());
        row.push(r.degenerate_iterations.to_string());
        row
    });
    write_csv(path, preamble, &COMPARISON_HEADER, rows)
}
