//! End-to-end sign-flip score test.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::decide::{decide, Alternative, Method, TestResult};
use super::effective::effective_contributions;
use super::plan::{FlipPlan, SamplingMode};
use super::stats::{flip_statistics_quadratic, flip_statistics_scalar, StatVector};
use crate::error::{Error, Result};
use crate::glm::{fit_null, score_contributions, DesignMatrix, Family, ScoreSet};
use crate::linalg::{spd_inverse, condition_estimate, MAX_CONDITION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMethod {
    /// Raw score contributions at the null fit.
    Basic,
    /// Contributions with the nuisance projection removed.
    Effective,
}

impl ScoreMethod {
    pub fn method_tag(&self) -> Method {
        match self {
            ScoreMethod::Basic => Method::FlipBasic,
            ScoreMethod::Effective => Method::FlipEffective,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VhatChoice {
    Identity,
    InverseEffectiveInfo,
}

impl VhatChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            VhatChoice::Identity => "identity",
            VhatChoice::InverseEffectiveInfo => "inv-effective-info",
        }
    }
}

impl fmt::Display for VhatChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VhatChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(VhatChoice::Identity),
            "inv-effective-info" => Ok(VhatChoice::InverseEffectiveInfo),
            other => Err(Error::InvalidInput(format!(
                "unknown weight matrix `{other}` (expected identity or inv-effective-info)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipOptions {
    pub method: ScoreMethod,
    pub alternative: Alternative,
    pub alpha: f64,
    pub w: usize,
    pub mode: SamplingMode,
    pub seed: u64,
    pub vhat: VhatChoice,
}

impl Default for FlipOptions {
    fn default() -> Self {
        Self {
            method: ScoreMethod::Effective,
            alternative: Alternative::TwoSidedAbs,
            alpha: 0.05,
            w: 5000,
            mode: SamplingMode::WithReplacement,
            seed: 1,
            vhat: VhatChoice::Identity,
        }
    }
}

impl FlipOptions {
    pub fn plan(&self, n: usize) -> Result<FlipPlan> {
        FlipPlan::new(n, self.w, self.mode, self.seed)
    }
}

/// Flip statistics for a score set under a given plan.
///
/// With one tested coordinate the statistics are scalar; otherwise they are
/// quadratic forms with the chosen weight matrix.
pub fn flip_statistics(
    scores: &ScoreSet,
    method: ScoreMethod,
    vhat: VhatChoice,
    plan: &FlipPlan,
) -> Result<StatVector> {
    let contribs: DMatrix<f64> = match method {
        ScoreMethod::Basic => scores.nu.clone(),
        ScoreMethod::Effective => effective_contributions(scores)?.nu_star,
    };
    let d = contribs.ncols();
    if d == 1 {
        return flip_statistics_scalar(contribs.as_slice(), plan);
    }
    let weight = match vhat {
        VhatChoice::Identity => DMatrix::identity(d, d),
        VhatChoice::InverseEffectiveInfo => {
            let eff = scores.info.effective()?;
            let cond = condition_estimate(&eff);
            if cond > MAX_CONDITION {
                return Err(Error::Singular(cond));
            }
            spd_inverse(&eff)?
        }
    };
    flip_statistics_quadratic(&contribs, &weight, plan, vhat.as_str())
}

/// Flip test on precomputed scores; the entry point for injecting
/// misspecified scores or sharing one plan across methods.
pub fn flip_test_scores(
    scores: &ScoreSet,
    options: &FlipOptions,
    plan: &FlipPlan,
) -> Result<TestResult> {
    let stats = flip_statistics(scores, options.method, options.vhat, plan)?;
    Ok(decide(&stats, options.alpha, options.alternative)?
        .with_method(options.method.method_tag())
        .with_seed(plan.seed()))
}

/// Fits the null model, computes scores and runs the flip test.
pub fn flip_test(design: &DesignMatrix, family: Family, options: &FlipOptions) -> Result<TestResult> {
    let fit = fit_null(design, family)?;
    let scores = score_contributions(&fit, design, family)?;
    let plan = options.plan(design.nrows())?;
    flip_test_scores(&scores, options, &plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::warpbreaks;
    use crate::glm::build_design;

    #[test]
    fn pre_centred_linear_model_basic_equals_effective() {
        let raw = [0.3, -1.1, 2.4, 0.7, 1.9, -0.4, 0.05, 1.3];
        let mean = raw.iter().sum::<f64>() / 8.0;
        let xs: Vec<f64> = raw.iter().map(|v| v - mean).collect();
        let y = vec![1.0, 0.2, -0.5, 2.2, 0.9, 1.4, -0.7, 0.3];
        let x = DMatrix::from_fn(8, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        let d = DesignMatrix::new(x, vec!["1".into(), "x".into()], vec![1], y, vec![]).unwrap();
        let mut opts = FlipOptions {
            w: 2000,
            seed: 4,
            method: ScoreMethod::Basic,
            ..FlipOptions::default()
        };
        let basic = flip_test(&d, Family::Gaussian, &opts).unwrap();
        opts.method = ScoreMethod::Effective;
        let eff = flip_test(&d, Family::Gaussian, &opts).unwrap();
        assert_eq!(basic.p_value, eff.p_value);
    }

    #[test]
    fn scaled_scores_give_identical_decisions() {
        let t = warpbreaks();
        let d = build_design(&t, "breaks", &["wool"], &["tension"], true, &[0.0]).unwrap();
        let fit = fit_null(&d, Family::Poisson).unwrap();
        let scores = score_contributions(&fit, &d, Family::Poisson).unwrap();
        let opts = FlipOptions {
            w: 4000,
            seed: 9,
            ..FlipOptions::default()
        };
        let plan = opts.plan(54).unwrap();
        let base = flip_test_scores(&scores, &opts, &plan).unwrap();
        let scaled = flip_test_scores(&scores.scaled(5.0, 2.0), &opts, &plan).unwrap();
        assert_eq!(base.p_value, scaled.p_value);
        assert_eq!(base.reject, scaled.reject);
    }

    #[test]
    fn multivariate_uses_quadratic_form() {
        let t = warpbreaks();
        let d = build_design(&t, "breaks", &["tension"], &["wool"], true, &[0.0, 0.0]).unwrap();
        for vhat in [VhatChoice::Identity, VhatChoice::InverseEffectiveInfo] {
            let opts = FlipOptions {
                w: 1000,
                vhat,
                ..FlipOptions::default()
            };
            let r = flip_test(&d, Family::Poisson, &opts).unwrap();
            assert!(r.statistic >= 0.0);
            assert_eq!(r.alternative, Alternative::Greater);
            assert!(r.p_value >= 1.0 / 1000.0 && r.p_value <= 1.0);
        }
    }
}
