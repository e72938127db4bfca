//! Default JZS Bayes factor for t-tests.
//!
//! The Cauchy prior on effect size is written as a normal scale mixture with
//! an inverse-gamma(1/2, r²/2) mixing density on `g`, which turns BF10 into a
//! one-dimensional integral over `g`. The integrand is evaluated in log space
//! on `u = ln g` and integrated with adaptive Gauss–Kronrod (7, 15).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Cauchy prior scale on effect size.
pub const DEFAULT_BF_SCALE: f64 = FRAC_1_SQRT_2;

const REL_TOL: f64 = 1e-10;
const MAX_INTERVALS: usize = 2000;
/// Integration window: where the log integrand is within this of its peak.
const LOG_WINDOW: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TDesign {
    /// Independent groups of the given sizes.
    TwoSample { na: usize, nb: usize },
    /// One sample, or paired differences, of size `n`.
    OneSample { n: usize },
}

impl TDesign {
    /// Effective sample size and degrees of freedom.
    fn n_and_df(self) -> Result<(f64, f64)> {
        match self {
            TDesign::TwoSample { na, nb } if na >= 2 && nb >= 2 => {
                let (a, b) = (na as f64, nb as f64);
                Ok((a * b / (a + b), a + b - 2.0))
            }
            TDesign::OneSample { n } if n >= 2 => Ok((n as f64, n as f64 - 1.0)),
            _ => Err(Error::Argument(format!(
                "sample sizes too small for a t-test: {self:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesFactor {
    pub bf10: f64,
    pub ln_bf10: f64,
}

/// BF10 for an observed t statistic under a Cauchy(0, `scale`) prior.
pub fn jzs_bayes_factor(t: f64, design: TDesign, scale: f64) -> Result<BayesFactor> {
    if !t.is_finite() {
        return Err(Error::Argument(format!(
            "t statistic must be finite, got {t}"
        )));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Argument(format!(
            "prior scale must be positive, got {scale}"
        )));
    }
    let (n, df) = design.n_and_df()?;
    let t2 = t * t;
    let null = -(df + 1.0) / 2.0 * (t2 / df).ln_1p();
    let log_const = scale.ln() - 0.5 * (2.0 * PI).ln();
    let r2 = scale * scale;
    // log of (integrand in g) * g, i.e. the integrand in u = ln g
    let h = |u: f64| {
        let g = u.exp();
        let ng = (n * g).ln_1p();
        -0.5 * ng - (df + 1.0) / 2.0 * (t2 / ((1.0 + n * g) * df)).ln_1p() - null + log_const
            - 0.5 * u
            - r2 / (2.0 * g)
    };

    let (lo, hi, peak) = window(&h)?;
    let (integral, _) = gauss_kronrod(|u| (h(u) - peak).exp(), lo, hi)?;
    if !(integral > 0.0 && integral.is_finite()) {
        return Err(Error::Numerical(format!(
            "JZS integral is {integral} (t={t}, {design:?}, window [{lo}, {hi}])"
        )));
    }
    let ln_bf10 = peak + integral.ln();
    Ok(BayesFactor {
        bf10: ln_bf10.exp(),
        ln_bf10,
    })
}

/// Locates the peak of `h` on a coarse grid and the range where it stays
/// within `LOG_WINDOW` of it.
fn window(h: &impl Fn(f64) -> f64) -> Result<(f64, f64, f64)> {
    const START: f64 = -50.0;
    const END: f64 = 250.0;
    const STEP: f64 = 0.25;
    let steps = ((END - START) / STEP) as usize;
    let values: Vec<f64> = (0..=steps).map(|i| h(START + i as f64 * STEP)).collect();
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Numerical("NaN in JZS integrand".into()));
    }
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let first = values
        .iter()
        .position(|&v| v > peak - LOG_WINDOW)
        .expect("peak is on the grid");
    let last = values
        .iter()
        .rposition(|&v| v > peak - LOG_WINDOW)
        .expect("peak is on the grid");
    if first == 0 || last == steps {
        return Err(Error::Numerical(format!(
            "JZS integrand does not decay inside u in [{START}, {END}] (peak {peak})"
        )));
    }
    Ok((
        START + (first - 1) as f64 * STEP,
        START + (last + 1) as f64 * STEP,
        peak,
    ))
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod_15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Global adaptive Gauss–Kronrod: bisects the interval with the largest error
/// estimate until the summed error is below `REL_TOL` of the estimate.
/// Returns the integral and its error estimate.
fn gauss_kronrod(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64)> {
    let (value, err) = kronrod_15(&f, a, b);
    let mut parts = vec![(a, b, value, err)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let total_err: f64 = parts.iter().map(|p| p.3).sum();
        if total_err <= REL_TOL * total.abs() {
            return Ok((total, total_err));
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Numerical(format!(
                "quadrature did not converge: estimate {total:e}, error {total_err:e} after {} intervals on [{a}, {b}]",
                parts.len()
            )));
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod_15(&f, lo, mid);
        let (v2, e2) = kronrod_15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}
