//! IRLS fitting under the null (nuisance columns only) and for the full model.

use nalgebra::{DMatrix, DVector};

use super::design::DesignMatrix;
use super::family::Family;
use crate::error::{Error, Result};
use crate::linalg::{solve_spd_vec, weighted_cross};

pub const MAX_ITERATIONS: usize = 100;
pub const DEVIANCE_TOLERANCE: f64 = 1e-8;
pub const MAX_HALVINGS: usize = 20;
const BOUNDARY_EPS: f64 = 1e-8;

/// Maximum-likelihood fit of the nuisance coefficients with the tested
/// coefficients held at their null value.
#[derive(Debug, Clone, PartialEq)]
pub struct NullFit {
    pub gamma_hat: Vec<f64>,
    pub beta0: Vec<f64>,
    pub mu_hat: Vec<f64>,
    pub eta_hat: Vec<f64>,
    /// IRLS weights `b''(eta_i) / a_i` at the fitted linear predictor.
    pub weights: Vec<f64>,
    pub deviance: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Some fitted means are numerically on the boundary of the mean space.
    pub boundary: bool,
}

impl NullFit {
    /// The full `k`-vector of parameters in design-column order.
    pub fn parameters(&self, design: &DesignMatrix) -> Vec<f64> {
        let mut p = vec![0.0; design.ncols()];
        for (&c, g) in design.nuisance().iter().zip(&self.gamma_hat) {
            p[c] = *g;
        }
        for (&c, b) in design.tested().iter().zip(&self.beta0) {
            p[c] = *b;
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullFit {
    /// All `k` coefficients in design-column order.
    pub coefficients: Vec<f64>,
    pub mu_hat: Vec<f64>,
    pub eta_hat: Vec<f64>,
    pub weights: Vec<f64>,
    pub deviance: f64,
    pub iterations: usize,
    pub converged: bool,
    pub boundary: bool,
}

impl FullFit {
    pub fn beta_hat(&self, design: &DesignMatrix) -> Vec<f64> {
        design.tested().iter().map(|&c| self.coefficients[c]).collect()
    }
}

struct Irls {
    coef: Vec<f64>,
    eta: Vec<f64>,
    mu: Vec<f64>,
    weights: Vec<f64>,
    deviance: f64,
    iterations: usize,
    boundary: bool,
}

fn deviance(family: Family, y: &[f64], mu: &[f64], trials: &[f64]) -> f64 {
    y.iter()
        .zip(mu)
        .zip(trials)
        .map(|((&y, &m), &t)| family.unit_deviance(y, m, t))
        .sum()
}

fn linear_predictor(x: &DMatrix<f64>, coef: &[f64], offset: &[f64]) -> Vec<f64> {
    let c = DVector::from_column_slice(coef);
    let xb = x * c;
    xb.iter().zip(offset).map(|(a, o)| a + o).collect()
}

fn means(family: Family, eta: &[f64], trials: &[f64]) -> Option<Vec<f64>> {
    eta.iter()
        .zip(trials)
        .map(|(&e, &t)| {
            let m = family.inverse_link(e, t);
            (family.valid_eta(e) && family.valid_mean(m, t)).then_some(m)
        })
        .collect()
}

fn on_boundary(family: Family, mu: &[f64], trials: &[f64]) -> bool {
    match family {
        Family::Poisson => mu.iter().any(|&m| m < BOUNDARY_EPS),
        Family::Binomial => mu
            .iter()
            .zip(trials)
            .any(|(&m, &t)| m / t < BOUNDARY_EPS || m / t > 1.0 - BOUNDARY_EPS),
        _ => false,
    }
}

fn irls(
    x: &DMatrix<f64>,
    y: &[f64],
    trials: &[f64],
    offset: &[f64],
    family: Family,
) -> Result<Irls> {
    family.check_fittable()?;
    for (i, (&yi, &ti)) in y.iter().zip(trials).enumerate() {
        family.check_response(i, yi, ti)?;
    }
    let p = x.ncols();
    if p == 0 {
        let eta = offset.to_vec();
        let mu = means(family, &eta, trials).ok_or(Error::InvalidMean)?;
        let weights = eta
            .iter()
            .zip(trials)
            .map(|(&e, &t)| family.cumulant_d2(e, t) / family.dispersion())
            .collect();
        let deviance = deviance(family, y, &mu, trials);
        let boundary = on_boundary(family, &mu, trials);
        return Ok(Irls {
            coef: Vec::new(),
            eta,
            mu,
            weights,
            deviance,
            iterations: 0,
            boundary,
        });
    }

    let mut mu: Vec<f64> = y
        .iter()
        .zip(trials)
        .map(|(&yi, &t)| family.initial_mean(yi, t))
        .collect();
    let mut eta: Vec<f64> = mu.iter().zip(trials).map(|(&m, &t)| family.link(m, t)).collect();
    let mut dev_old = deviance(family, y, &mu, trials);
    let mut coef_old: Option<Vec<f64>> = None;

    for iter in 1..=MAX_ITERATIONS {
        let w: Vec<f64> = eta
            .iter()
            .zip(trials)
            .map(|(&e, &t)| family.cumulant_d2(e, t) / family.dispersion())
            .collect();
        let z: Vec<f64> = (0..y.len())
            .map(|i| eta[i] - offset[i] + (y[i] - mu[i]) / w[i])
            .collect();
        let xtwx = weighted_cross(x, &w);
        let xtwz = DVector::from_fn(p, |c, _| (0..y.len()).map(|i| x[(i, c)] * w[i] * z[i]).sum());
        let mut coef: Vec<f64> = solve_spd_vec(&xtwx, &xtwz)?.iter().cloned().collect();

        let mut new_eta = linear_predictor(x, &coef, offset);
        let mut new_mu = means(family, &new_eta, trials);
        let mut dev = new_mu.as_ref().map(|m| deviance(family, y, m, trials));
        let mut halvings = 0;
        loop {
            let bad = match dev {
                None => true,
                Some(d) => {
                    !d.is_finite() || (coef_old.is_some() && d > dev_old * (1.0 + 1e-12) + 1e-12)
                }
            };
            if !bad {
                break;
            }
            let Some(old) = coef_old.as_ref() else {
                return Err(Error::InvalidMean);
            };
            if halvings == MAX_HALVINGS {
                if dev.is_none() {
                    return Err(Error::InvalidMean);
                }
                break;
            }
            halvings += 1;
            coef = coef.iter().zip(old).map(|(c, o)| 0.5 * (c + o)).collect();
            new_eta = linear_predictor(x, &coef, offset);
            new_mu = means(family, &new_eta, trials);
            dev = new_mu.as_ref().map(|m| deviance(family, y, m, trials));
        }
        let dev = dev.expect("checked above");
        eta = new_eta;
        mu = new_mu.expect("checked above");
        let change = (dev - dev_old).abs();
        dev_old = dev;
        coef_old = Some(coef);
        if change < DEVIANCE_TOLERANCE * (dev.abs() + 0.1) {
            let weights = eta
                .iter()
                .zip(trials)
                .map(|(&e, &t)| family.cumulant_d2(e, t) / family.dispersion())
                .collect();
            let boundary = on_boundary(family, &mu, trials);
            return Ok(Irls {
                coef: coef_old.take().expect("set above"),
                eta,
                mu,
                weights,
                deviance: dev,
                iterations: iter,
                boundary,
            });
        }
    }
    Err(Error::NotConverged(MAX_ITERATIONS))
}

/// Fits the nuisance coefficients under H0 (tested effect in the offset).
pub fn fit_null(design: &DesignMatrix, family: Family) -> Result<NullFit> {
    let xn = design.nuisance_block();
    if !crate::linalg::full_column_rank(&xn) {
        return Err(Error::RankDeficient);
    }
    let fit = irls(&xn, design.response(), design.trials(), design.offset(), family)?;
    Ok(NullFit {
        gamma_hat: fit.coef,
        beta0: design.null_value().to_vec(),
        mu_hat: fit.mu,
        eta_hat: fit.eta,
        weights: fit.weights,
        deviance: fit.deviance,
        iterations: fit.iterations,
        converged: true,
        boundary: fit.boundary,
    })
}

/// Fits all `k` coefficients.
pub fn fit_full(design: &DesignMatrix, family: Family) -> Result<FullFit> {
    if design.nrows() < design.ncols() || !crate::linalg::full_column_rank(design.x()) {
        return Err(Error::RankDeficient);
    }
    let fit = irls(
        design.x(),
        design.response(),
        design.trials(),
        design.base_offset(),
        family,
    )?;
    Ok(FullFit {
        coefficients: fit.coef,
        mu_hat: fit.mu,
        eta_hat: fit.eta,
        weights: fit.weights,
        deviance: fit.deviance,
        iterations: fit.iterations,
        converged: true,
        boundary: fit.boundary,
    })
}

/// Log-likelihood at a full parameter vector (design-column order).
pub fn log_likelihood(params: &[f64], design: &DesignMatrix, family: Family) -> Result<f64> {
    if params.len() != design.ncols() {
        return Err(Error::InvalidInput(format!(
            "{} parameters for {} columns",
            params.len(),
            design.ncols()
        )));
    }
    let eta = linear_predictor(design.x(), params, design.base_offset());
    let mut total = 0.0;
    for ((&e, &y), &t) in eta.iter().zip(design.response()).zip(design.trials()) {
        if !family.valid_eta(e) || !family.valid_mean(family.inverse_link(e, t), t) {
            return Err(Error::InvalidMean);
        }
        total += family.log_density(y, e, t);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::warpbreaks;
    use crate::glm::design::build_design;
    use crate::table::Column;

    fn gaussian_design(y: Vec<f64>, x: Vec<f64>) -> DesignMatrix {
        let n = y.len();
        let m = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { x[i] });
        DesignMatrix::new(m, vec!["1".into(), "x".into()], vec![1], y, vec![]).unwrap()
    }

    #[test]
    fn gaussian_intercept_only_null_is_sample_mean() {
        let y = vec![1.5, -0.2, 3.3, 2.0, 0.7];
        let d = gaussian_design(y.clone(), vec![0.3, 1.0, -2.0, 0.5, 0.1]);
        let fit = fit_null(&d, Family::Gaussian).unwrap();
        let mean = y.iter().sum::<f64>() / 5.0;
        assert!((fit.gamma_hat[0] - mean).abs() < 1e-12);
        assert!(fit.converged && fit.weights.iter().all(|&w| w == 1.0));
    }

    #[test]
    fn gaussian_full_fit_is_ols() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.5, 6.0];
        let y = vec![1.1, 2.9, 5.2, 6.8, 10.1, 13.0];
        let d = gaussian_design(y.clone(), x.clone());
        let fit = fit_full(&d, Family::Gaussian).unwrap();
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        let slope = sxy / sxx;
        assert!((fit.coefficients[1] - slope).abs() < 1e-10);
        assert!((fit.coefficients[0] - (my - slope * mx)).abs() < 1e-10);
    }

    #[test]
    fn warpbreaks_null_fit_reproduces_tension_means() {
        let t = warpbreaks();
        let d = build_design(&t, "breaks", &["wool"], &["tension"], true, &[0.0]).unwrap();
        let fit = fit_null(&d, Family::Poisson).unwrap();
        let Some(Column::Categorical { codes, .. }) = t.column("tension") else {
            unreachable!()
        };
        let y = t.numeric("breaks").unwrap();
        for level in 0..3 {
            let rows: Vec<usize> = (0..54).filter(|&i| codes[i] == level).collect();
            let mean = rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64;
            for &i in &rows {
                assert!((fit.mu_hat[i] - mean).abs() < 1e-8 * mean, "{} vs {mean}", fit.mu_hat[i]);
            }
        }
        let xn = d.nuisance_block();
        for c in 0..xn.ncols() {
            let s: f64 = (0..54).map(|i| xn[(i, c)] * (y[i] - fit.mu_hat[i])).sum();
            assert!(s.abs() < 1e-6 * y.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
    }

    #[test]
    fn zero_tested_column_leaves_fit_unchanged() {
        let y = vec![2.0, 0.0, 5.0, 3.0, 1.0, 4.0];
        let z = vec![0.1, -0.4, 1.2, 0.3, -1.0, 0.8];
        let with = DMatrix::from_fn(6, 3, |i, j| match j {
            0 => 1.0,
            1 => z[i],
            _ => 0.0,
        });
        let without = with.columns(0, 2).into_owned();
        let names = |k: usize| (0..k).map(|c| c.to_string()).collect::<Vec<_>>();
        let d_with = DesignMatrix::new(with, names(3), vec![2], y.clone(), vec![0.0]).unwrap();
        // Without the tested column the nuisance set is everything; reuse fit_full.
        let d_without = DesignMatrix::new(without, names(2), vec![1], y, vec![]).unwrap();
        let a = fit_null(&d_with, Family::Poisson).unwrap();
        let b = fit_full(&d_without, Family::Poisson).unwrap();
        assert_eq!(a.gamma_hat, b.coefficients);
        assert_eq!(a.mu_hat, b.mu_hat);
    }

    #[test]
    fn all_zero_poisson_reports_boundary() {
        let y = vec![0.0; 8];
        let x: Vec<f64> = (0..8).map(|i| i as f64 * 0.3 - 1.0).collect();
        let d = gaussian_design(y, x);
        match fit_full(&d, Family::Poisson) {
            Ok(fit) => assert!(fit.boundary),
            Err(e) => assert!(e.is_numerical()),
        }
    }

    #[test]
    fn likelihood_is_maximized_at_the_mle() {
        let t = warpbreaks();
        let d = build_design(&t, "breaks", &["wool"], &["tension"], true, &[0.0]).unwrap();
        let fit = fit_full(&d, Family::Poisson).unwrap();
        let best = log_likelihood(&fit.coefficients, &d, Family::Poisson).unwrap();
        for r in 0..20 {
            let p: Vec<f64> = fit
                .coefficients
                .iter()
                .enumerate()
                .map(|(c, v)| v + 0.01 * (((r * 7 + c * 3) % 11) as f64 - 5.0))
                .collect();
            assert!(log_likelihood(&p, &d, Family::Poisson).unwrap() <= best);
        }
    }

    #[test]
    fn gaussian_likelihood_differences_are_quadratic() {
        let d = gaussian_design(vec![0.5, 1.7, -0.3], vec![1.0, 2.0, 3.0]);
        let (a, b) = ([0.2, 0.4], [-0.1, 0.9]);
        let la = log_likelihood(&a, &d, Family::Gaussian).unwrap();
        let lb = log_likelihood(&b, &d, Family::Gaussian).unwrap();
        let rss = |p: &[f64; 2]| -> f64 {
            (0..3)
                .map(|i| {
                    let e = d.response()[i] - p[0] - p[1] * d.x()[(i, 1)];
                    e * e
                })
                .sum()
        };
        assert!(((la - lb) - (-0.5 * rss(&a) + 0.5 * rss(&b))).abs() < 1e-10);
    }

    #[test]
    fn rejects_invalid_responses_and_families() {
        let d = gaussian_design(vec![1.0, -1.0, 2.0], vec![0.0, 1.0, 2.0]);
        assert!(matches!(
            fit_null(&d, Family::Poisson),
            Err(Error::InvalidResponse { row: 1, .. })
        ));
        assert!(matches!(
            fit_null(&d, Family::NegativeBinomial { theta: 1.0 }),
            Err(Error::UnsupportedFamily(_))
        ));
    }
}
