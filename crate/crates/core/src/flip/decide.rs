//! Decision rules and p-values for flip statistics.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::stats::{StatKind, StatVector};
use crate::error::{Error, Result};

/// Slack for turning `alpha * w` into an order-statistic index.
const INDEX_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alternative {
    Greater,
    Less,
    /// Counts `|T_j| >= |T_1|`.
    TwoSidedAbs,
    /// Union of a lower-tail test at `lower` and an upper-tail test at `upper`;
    /// both must be multiples of `1 / w`.
    TwoSidedTails { lower: f64, upper: f64 },
}

impl Alternative {
    pub fn name(&self) -> &'static str {
        match self {
            Alternative::Greater => "greater",
            Alternative::Less => "less",
            Alternative::TwoSidedAbs => "two-sided-abs",
            Alternative::TwoSidedTails { .. } => "two-sided-tails",
        }
    }

    /// Equal tails `floor(alpha / 2 * w) / w` on each side.
    pub fn equal_tails(alpha: f64, w: usize) -> Self {
        let t = ((alpha / 2.0) * w as f64 + INDEX_EPS).floor() / w as f64;
        Alternative::TwoSidedTails { lower: t, upper: t }
    }

    pub fn is_two_sided(&self) -> bool {
        matches!(
            self,
            Alternative::TwoSidedAbs | Alternative::TwoSidedTails { .. }
        )
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Alternative {
    type Err = Error;
    /// `two-sided-tails` parses with zero-width tails; callers fill them in
    /// with [`Alternative::equal_tails`] once `alpha` and `w` are known.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greater" => Ok(Alternative::Greater),
            "less" => Ok(Alternative::Less),
            "two-sided" | "two-sided-abs" => Ok(Alternative::TwoSidedAbs),
            "two-sided-tails" => Ok(Alternative::TwoSidedTails {
                lower: 0.0,
                upper: 0.0,
            }),
            other => Err(Error::InvalidInput(format!(
                "unknown alternative `{other}` (expected greater, less, two-sided-abs \
                 or two-sided-tails)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "flip")]
    Flip,
    #[serde(rename = "flip-basic")]
    FlipBasic,
    #[serde(rename = "flip-effective")]
    FlipEffective,
    #[serde(rename = "parametric")]
    Parametric,
    #[serde(rename = "sandwich")]
    Sandwich,
    #[serde(rename = "quasi")]
    Quasi,
    #[serde(rename = "t-test")]
    TTest,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Flip => "flip",
            Method::FlipBasic => "flip-basic",
            Method::FlipEffective => "flip-effective",
            Method::Parametric => "parametric",
            Method::Sandwich => "sandwich",
            Method::Quasi => "quasi",
            Method::TTest => "t-test",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Summary of the flip distribution (all `w` values, identity included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipSummary {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl FlipSummary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        Self {
            mean,
            sd: var.sqrt(),
            min: values.iter().cloned().fold(f64::INFINITY, f64::min),
            max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub alternative: Alternative,
    pub w: Option<usize>,
    pub seed: Option<u64>,
    pub summary: Option<FlipSummary>,
}

impl TestResult {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// `k`-th order statistic (1-based) of `values`.
fn order_statistic(values: &[f64], k: usize) -> f64 {
    let mut buf = values.to_vec();
    let (_, v, _) = buf.select_nth_unstable_by(k - 1, f64::total_cmp);
    *v
}

fn upper_index(alpha: f64, w: usize) -> usize {
    (((1.0 - alpha) * w as f64 - INDEX_EPS).ceil() as usize).clamp(1, w)
}

fn lower_index(alpha: f64, w: usize) -> usize {
    ((alpha * w as f64 + 1.0 + INDEX_EPS).floor() as usize).clamp(1, w)
}

fn check_tail(a: f64, w: usize) -> Result<usize> {
    let scaled = a * w as f64;
    let k = scaled.round();
    if a < 0.0 || a >= 1.0 || (scaled - k).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "tail level {a} is not a multiple of 1/{w} in [0, 1)"
        )));
    }
    Ok(k as usize)
}

/// Quadratic statistics are non-negative and only large values are evidence,
/// so every two-sided alternative reduces to `Greater`.
fn effective_alternative(stats: &StatVector, alternative: Alternative) -> Alternative {
    match (stats.kind, alternative) {
        (StatKind::Quadratic, a) if a.is_two_sided() => Alternative::Greater,
        (_, a) => a,
    }
}

/// Resampling p-value counting the identity flip.
pub fn p_value(stats: &StatVector, alternative: Alternative) -> f64 {
    let t1 = stats.observed();
    let w = stats.w() as f64;
    let count = |pred: &dyn Fn(f64) -> bool| stats.values.iter().filter(|&&v| pred(v)).count();
    match effective_alternative(stats, alternative) {
        Alternative::Greater => count(&|v| v >= t1) as f64 / w,
        Alternative::Less => count(&|v| v <= t1) as f64 / w,
        Alternative::TwoSidedAbs => count(&|v| v.abs() >= t1.abs()) as f64 / w,
        Alternative::TwoSidedTails { .. } => {
            let g = count(&|v| v >= t1) as f64 / w;
            let l = count(&|v| v <= t1) as f64 / w;
            (2.0 * g.min(l)).min(1.0)
        }
    }
}

/// Order-statistic decision rule over all `w` statistics (identity included).
///
/// Rejection needs a strict inequality, so ties never reject.
pub fn decide(stats: &StatVector, alpha: f64, alternative: Alternative) -> Result<TestResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha = {alpha} outside (0, 1)")));
    }
    let w = stats.w();
    let t1 = stats.observed();
    let alt = effective_alternative(stats, alternative);
    let reject = match alt {
        Alternative::Greater => t1 > order_statistic(&stats.values, upper_index(alpha, w)),
        Alternative::Less => t1 < order_statistic(&stats.values, lower_index(alpha, w)),
        Alternative::TwoSidedAbs => p_value(stats, alt) <= alpha,
        Alternative::TwoSidedTails { lower, upper } => {
            let lo = check_tail(lower, w)?;
            let hi = check_tail(upper, w)?;
            let below = t1 < order_statistic(&stats.values, lo + 1);
            let above = t1 > order_statistic(&stats.values, w - hi);
            below || above
        }
    };
    let alpha = match alt {
        Alternative::TwoSidedTails { lower, upper } => lower + upper,
        _ => alpha,
    };
    Ok(TestResult {
        method: Method::Flip,
        statistic: t1,
        p_value: p_value(stats, alt),
        reject,
        alpha,
        alternative: alt,
        w: Some(w),
        seed: None,
        summary: Some(FlipSummary::of(&stats.values)),
    })
}
