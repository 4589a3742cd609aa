//! Data generators for the simulation scenarios.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::stream;

/// Standard deviation rule for heteroscedastic normal data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaRule {
    /// `sigma_i = exp(i)` for `i = 1..n`.
    ExpIndex,
    Constant(f64),
}

impl SigmaRule {
    pub fn sigma(&self, i: usize) -> f64 {
        match *self {
            SigmaRule::ExpIndex => ((i + 1) as f64).exp(),
            SigmaRule::Constant(s) => s,
        }
    }
}

/// Equicorrelation matrix of size `dim`.
pub fn equicorrelation(dim: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| if i == j { 1.0 } else { rho })
}

/// Lower Cholesky factor of a correlation matrix.
pub fn correlation_factor(r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !r.is_square() {
        return Err(Error::InvalidInput("correlation matrix is not square".into()));
    }
    let dim = r.nrows();
    for i in 0..dim {
        if (r[(i, i)] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput("correlation matrix needs a unit diagonal".into()));
        }
        for j in 0..i {
            if (r[(i, j)] - r[(j, i)]).abs() > 1e-12 {
                return Err(Error::InvalidInput("correlation matrix is not symmetric".into()));
            }
        }
    }
    r.clone()
        .cholesky()
        .map(|c| c.l())
        .ok_or(Error::NotPsd)
}

/// `n` rows drawn from `N(0, R)` where `L` is the Cholesky factor of `R`.
pub fn mvn_rows<R: Rng + ?Sized>(n: usize, factor: &DMatrix<f64>, rng: &mut R) -> DMatrix<f64> {
    let dim = factor.nrows();
    let z = DMatrix::from_fn(n, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    z * factor.transpose()
}

pub fn gen_mvn_covariates(n: usize, dim: usize, r: &DMatrix<f64>, seed: u64) -> Result<DMatrix<f64>> {
    if r.nrows() != dim {
        return Err(Error::InvalidInput(format!(
            "correlation matrix is {}x{}, expected {dim}x{dim}",
            r.nrows(),
            r.ncols()
        )));
    }
    let factor = correlation_factor(r)?;
    Ok(mvn_rows(n, &factor, &mut stream(seed, 0)))
}

/// Gamma-Poisson draw with mean `mu` and variance `mu + mu^2 / theta`.
pub fn negbin_draw<R: Rng + ?Sized>(mu: f64, theta: f64, rng: &mut R) -> f64 {
    let lambda = Gamma::new(theta, mu / theta)
        .expect("theta > 0 and finite mean")
        .sample(rng);
    poisson_draw(lambda, rng)
}

pub fn poisson_draw<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> f64 {
    if lambda > 0.0 {
        Poisson::new(lambda).expect("finite rate").sample(rng)
    } else {
        0.0
    }
}

pub fn negbin_response<R: Rng + ?Sized>(eta: &[f64], theta: f64, rng: &mut R) -> Vec<f64> {
    eta.iter().map(|e| negbin_draw(e.exp(), theta, rng)).collect()
}

pub fn gen_negbin_response(eta: &[f64], theta: f64, seed: u64) -> Result<Vec<f64>> {
    if !(theta > 0.0) {
        return Err(Error::InvalidInput(format!("theta must be positive, got {theta}")));
    }
    Ok(negbin_response(eta, theta, &mut stream(seed, 0)))
}

pub fn hetero_normal<R: Rng + ?Sized>(n: usize, mu: f64, rule: SigmaRule, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|i| {
            Normal::new(mu, rule.sigma(i))
                .expect("finite sd")
                .sample(rng)
        })
        .collect()
}

pub fn gen_hetero_normal(n: usize, mu: f64, rule: SigmaRule, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if let SigmaRule::Constant(s) = rule {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {s}")));
        }
    }
    Ok(hetero_normal(n, mu, rule, &mut stream(seed, 0)))
}
