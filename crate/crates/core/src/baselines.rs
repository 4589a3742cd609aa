//! Classical competitors: parametric score test, sandwich Wald tests,
//! quasi-Poisson Wald test and the one-sample t-test.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::flip::{effective_contributions, Alternative, Method, TestResult};
use crate::glm::{
    fit_full, fit_null, score_contributions, DesignMatrix, Family, FullFit, ScoreSet,
};
use crate::linalg::{
    condition_estimate, solve_spd_vec, spd_inverse, weighted_cross, MAX_CONDITION,
};

fn result(method: Method, statistic: f64, p_value: f64, alpha: f64, alt: Alternative) -> TestResult {
    TestResult {
        method,
        statistic,
        p_value,
        reject: p_value <= alpha,
        alpha,
        alternative: alt,
        w: None,
        seed: None,
        summary: None,
    }
}

/// p-value of a statistic with a symmetric reference distribution.
fn symmetric_p<D: ContinuousCDF<f64, f64>>(dist: &D, z: f64, alt: Alternative) -> f64 {
    match alt {
        Alternative::Greater => dist.sf(z),
        Alternative::Less => dist.cdf(z),
        Alternative::TwoSidedAbs | Alternative::TwoSidedTails { .. } => {
            (2.0 * dist.sf(z.abs())).min(1.0)
        }
    }
}

fn chi2_p(stat: f64, df: usize) -> f64 {
    ChiSquared::new(df as f64).expect("df > 0").sf(stat)
}

fn check_well_conditioned(m: &DMatrix<f64>) -> Result<()> {
    let cond = condition_estimate(m);
    if cond > MAX_CONDITION {
        Err(Error::Singular(cond))
    } else {
        Ok(())
    }
}

/// Observed effective score `S*` and effective information `I*`.
pub fn effective_score(scores: &ScoreSet) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let eff = effective_contributions(scores)?;
    let scale = (scores.nobs() as f64).sqrt().recip();
    let s = DVector::from_iterator(
        eff.nu_star.ncols(),
        eff.nu_star.column_iter().map(|c| c.sum() * scale),
    );
    Ok((s, scores.info.effective()?))
}

/// Rao statistic `S*' (I*)^{-1} S*`.
pub fn rao_statistic(scores: &ScoreSet) -> Result<f64> {
    let (s, info) = effective_score(scores)?;
    check_well_conditioned(&info)?;
    Ok(s.dot(&solve_spd_vec(&info, &s)?))
}

/// Parametric score test: `z = S* / sqrt(I*)` against N(0, 1) when one
/// coordinate is tested, the Rao statistic against chi-square otherwise.
pub fn parametric_score_from_scores(
    scores: &ScoreSet,
    alternative: Alternative,
    alpha: f64,
) -> Result<TestResult> {
    let d = scores.tested_dim();
    if d == 1 {
        let (s, info) = effective_score(scores)?;
        let var = info[(0, 0)];
        if !(var > 0.0) {
            return Err(Error::Singular(f64::INFINITY));
        }
        let z = s[0] / var.sqrt();
        let p = symmetric_p(&Normal::standard(), z, alternative);
        Ok(result(Method::Parametric, z, p, alpha, alternative))
    } else {
        let stat = rao_statistic(scores)?;
        Ok(result(
            Method::Parametric,
            stat,
            chi2_p(stat, d),
            alpha,
            Alternative::TwoSidedAbs,
        ))
    }
}

pub fn parametric_score_test(
    design: &DesignMatrix,
    family: Family,
    alternative: Alternative,
    alpha: f64,
) -> Result<TestResult> {
    let fit = fit_null(design, family)?;
    let scores = score_contributions(&fit, design, family)?;
    parametric_score_from_scores(&scores, alternative, alpha)
}

/// HC0 sandwich for the full-model coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichEstimate {
    /// `(X'WX)^{-1}`
    pub bread: DMatrix<f64>,
    /// `sum_i u_i u_i'` with `u_i = x_i (y_i - mu_i) / a_i`.
    pub meat: DMatrix<f64>,
    pub vcov: DMatrix<f64>,
}

impl SandwichEstimate {
    /// Sandwich with an arbitrary meat matrix.
    pub fn from_parts(information: &DMatrix<f64>, meat: DMatrix<f64>) -> Result<Self> {
        check_well_conditioned(information)?;
        let bread = spd_inverse(information)?;
        let vcov = &bread * &meat * &bread;
        let vcov = (&vcov + vcov.transpose()) * 0.5;
        Ok(Self { bread, meat, vcov })
    }

    pub fn block(&self, idx: &[usize]) -> DMatrix<f64> {
        self.vcov.select_rows(idx).select_columns(idx)
    }
}

pub fn full_information(fit: &FullFit, design: &DesignMatrix) -> DMatrix<f64> {
    weighted_cross(design.x(), &fit.weights)
}

pub fn sandwich_estimate(
    fit: &FullFit,
    design: &DesignMatrix,
    family: Family,
) -> Result<SandwichEstimate> {
    let x = design.x();
    let sq: Vec<f64> = design
        .response()
        .iter()
        .zip(&fit.mu_hat)
        .map(|(y, m)| {
            let r = (y - m) / family.dispersion();
            r * r
        })
        .collect();
    let meat = weighted_cross(x, &sq);
    SandwichEstimate::from_parts(&full_information(fit, design), meat)
}

/// `(beta_hat - beta0)' V^{-1} (beta_hat - beta0)` and the matching z for `d = 1`.
fn wald(
    beta: &[f64],
    null: &[f64],
    vcov: &DMatrix<f64>,
) -> Result<(f64, f64)> {
    let diff = DVector::from_iterator(beta.len(), beta.iter().zip(null).map(|(b, n)| b - n));
    if beta.len() == 1 {
        let v = vcov[(0, 0)];
        if !(v > 0.0) {
            return Err(Error::Singular(f64::INFINITY));
        }
        let z = diff[0] / v.sqrt();
        return Ok((z * z, z));
    }
    check_well_conditioned(vcov)?;
    Ok((diff.dot(&solve_spd_vec(vcov, &diff)?), f64::NAN))
}

/// Wald test with the HC0 sandwich covariance.
pub fn sandwich_wald_test(
    design: &DesignMatrix,
    family: Family,
    alternative: Alternative,
    alpha: f64,
) -> Result<TestResult> {
    let fit = fit_full(design, family)?;
    let sw = sandwich_estimate(&fit, design, family)?;
    let beta = fit.beta_hat(design);
    let (q, z) = wald(&beta, design.null_value(), &sw.block(design.tested()))?;
    if beta.len() == 1 {
        let p = symmetric_p(&Normal::standard(), z, alternative);
        Ok(result(Method::Sandwich, z, p, alpha, alternative))
    } else {
        Ok(result(
            Method::Sandwich,
            q,
            chi2_p(q, beta.len()),
            alpha,
            Alternative::TwoSidedAbs,
        ))
    }
}

/// Pearson dispersion `X^2 / (n - k)` of a full Poisson fit.
pub fn pearson_dispersion(fit: &FullFit, design: &DesignMatrix, family: Family) -> Result<f64> {
    let (n, k) = (design.nrows(), design.ncols());
    if n <= k {
        return Err(Error::InvalidInput(format!(
            "quasi dispersion needs n > k (n = {n}, k = {k})"
        )));
    }
    let x2: f64 = design
        .response()
        .iter()
        .zip(&fit.mu_hat)
        .zip(design.trials())
        .map(|((y, m), t)| (y - m) * (y - m) / family.variance(*m, *t))
        .sum();
    Ok(x2 / (n - k) as f64)
}

/// Quasi-Poisson Wald test with a fixed dispersion (`None` estimates it).
pub fn quasi_wald_with_dispersion(
    design: &DesignMatrix,
    dispersion: Option<f64>,
    alternative: Alternative,
    alpha: f64,
) -> Result<TestResult> {
    let design = design.rank_filtered();
    let (n, k) = (design.nrows(), design.ncols());
    if n <= k {
        return Err(Error::InvalidInput(format!(
            "quasi test needs n > k (n = {n}, k = {k})"
        )));
    }
    let fit = fit_full(&design, Family::Poisson)?;
    let phi = match dispersion {
        Some(p) => p,
        None => pearson_dispersion(&fit, &design, Family::Poisson)?,
    };
    let info = full_information(&fit, &design);
    check_well_conditioned(&info)?;
    let vcov = spd_inverse(&info)? * phi;
    let tested = design.tested();
    let vcov_d = vcov.select_rows(tested).select_columns(tested);
    let beta = fit.beta_hat(&design);
    let (q, t) = wald(&beta, design.null_value(), &vcov_d)?;
    let df = (n - k) as f64;
    if beta.len() == 1 {
        let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
        let p = symmetric_p(&dist, t, alternative);
        Ok(result(Method::Quasi, t, p, alpha, alternative))
    } else {
        let d = beta.len() as f64;
        let f = q / d;
        let p = FisherSnedecor::new(d, df).expect("df > 0").sf(f);
        Ok(result(Method::Quasi, f, p, alpha, Alternative::TwoSidedAbs))
    }
}

pub fn quasi_score_test(
    design: &DesignMatrix,
    family: Family,
    alternative: Alternative,
    alpha: f64,
) -> Result<TestResult> {
    if family != Family::Poisson {
        return Err(Error::InvalidInput(format!(
            "quasi test is defined for the poisson family, got {family}"
        )));
    }
    quasi_wald_with_dispersion(design, None, alternative, alpha)
}

/// `t = sqrt(n) (ybar - mu0) / s` on `n - 1` degrees of freedom.
pub fn one_sample_t(y: &[f64], mu0: f64, alternative: Alternative, alpha: f64) -> Result<TestResult> {
    let n = y.len();
    if n < 2 {
        return Err(Error::InvalidInput("t-test needs at least two observations".into()));
    }
    let nf = n as f64;
    let mean = y.iter().sum::<f64>() / nf;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    if !(var > 0.0) {
        return Err(Error::InvalidInput("sample variance is zero".into()));
    }
    let t = nf.sqrt() * (mean - mu0) / var.sqrt();
    let dist = StudentsT::new(0.0, 1.0, nf - 1.0).expect("df > 0");
    let p = symmetric_p(&dist, t, alternative);
    Ok(result(Method::TTest, t, p, alpha, alternative))
}
