//! Exponential families with their canonical links.
//!
//! Every family is written in natural-parameter form
//! `log f(y; eta) = (y * eta - b(eta)) / a + c(y)`, with `a = 1` throughout
//! (the gaussian variance is fixed at one). Binomial responses are success
//! counts out of `m` trials, so means and variances live on the count scale.

use std::fmt;

use statrs::function::factorial::ln_binomial;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const LOGIT_CLAMP: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Gaussian,
    Poisson,
    Binomial,
    /// Mean `mu`, variance `mu + mu^2 / theta`. Only used to generate data.
    NegativeBinomial { theta: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Poisson => "poisson",
            Family::Binomial => "binomial",
            Family::NegativeBinomial { .. } => "negative-binomial",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "normal" => Ok(Family::Gaussian),
            "poisson" => Ok(Family::Poisson),
            "binomial" => Ok(Family::Binomial),
            other => Err(Error::InvalidInput(format!(
                "unknown family `{other}` (expected gaussian, poisson or binomial)"
            ))),
        }
    }

    /// Families that can be fitted by IRLS.
    pub fn check_fittable(&self) -> Result<()> {
        match self {
            Family::NegativeBinomial { .. } => Err(Error::UnsupportedFamily(self.name())),
            _ => Ok(()),
        }
    }

    /// Dispersion `a_i`.
    pub fn dispersion(&self) -> f64 {
        1.0
    }

    /// Cumulant `b(eta)`; `trials` is only read by the binomial family.
    pub fn cumulant(&self, eta: f64, trials: f64) -> f64 {
        match *self {
            Family::Gaussian => 0.5 * eta * eta,
            Family::Poisson => eta.exp(),
            Family::Binomial => trials * softplus(eta),
            Family::NegativeBinomial { theta } => -theta * (-eta.exp()).ln_1p(),
        }
    }

    /// `b'(eta)`, the mean.
    pub fn cumulant_d1(&self, eta: f64, trials: f64) -> f64 {
        self.inverse_link(eta, trials)
    }

    /// `b''(eta)`, the variance as a function of the natural parameter.
    pub fn cumulant_d2(&self, eta: f64, trials: f64) -> f64 {
        match *self {
            Family::Gaussian => 1.0,
            Family::Poisson => eta.exp(),
            Family::Binomial => {
                let p = logistic(eta.clamp(-LOGIT_CLAMP, LOGIT_CLAMP));
                trials * p * (1.0 - p)
            }
            Family::NegativeBinomial { theta } => {
                let e = eta.exp();
                theta * e / ((1.0 - e) * (1.0 - e))
            }
        }
    }

    /// Canonical link `g(mu)`.
    pub fn link(&self, mu: f64, trials: f64) -> f64 {
        match *self {
            Family::Gaussian => mu,
            Family::Poisson => mu.ln(),
            Family::Binomial => {
                let p = mu / trials;
                (p / (1.0 - p)).ln()
            }
            Family::NegativeBinomial { theta } => (mu / (mu + theta)).ln(),
        }
    }

    /// Inverse canonical link `g^{-1}(eta) = b'(eta)`.
    pub fn inverse_link(&self, eta: f64, trials: f64) -> f64 {
        match *self {
            Family::Gaussian => eta,
            Family::Poisson => eta.exp(),
            Family::Binomial => trials * logistic(eta.clamp(-LOGIT_CLAMP, LOGIT_CLAMP)),
            Family::NegativeBinomial { theta } => {
                let e = eta.exp();
                theta * e / (1.0 - e)
            }
        }
    }

    /// Variance function on the mean scale.
    pub fn variance(&self, mu: f64, trials: f64) -> f64 {
        match *self {
            Family::Gaussian => 1.0,
            Family::Poisson => mu,
            Family::Binomial => mu * (1.0 - mu / trials),
            Family::NegativeBinomial { theta } => mu + mu * mu / theta,
        }
    }

    pub fn valid_mean(&self, mu: f64, trials: f64) -> bool {
        if !mu.is_finite() {
            return false;
        }
        match self {
            Family::Gaussian => true,
            Family::Poisson | Family::NegativeBinomial { .. } => mu > 0.0,
            Family::Binomial => mu > 0.0 && mu < trials,
        }
    }

    pub fn valid_eta(&self, eta: f64) -> bool {
        match self {
            Family::NegativeBinomial { .. } => eta < 0.0,
            _ => eta.is_finite(),
        }
    }

    pub fn check_response(&self, row: usize, y: f64, trials: f64) -> Result<()> {
        let bad = || Error::InvalidResponse {
            row,
            value: y,
            family: self.name(),
        };
        if !y.is_finite() {
            return Err(bad());
        }
        match self {
            Family::Gaussian => Ok(()),
            Family::Poisson | Family::NegativeBinomial { .. } => {
                if y < 0.0 || y.fract() != 0.0 {
                    Err(bad())
                } else {
                    Ok(())
                }
            }
            Family::Binomial => {
                if y < 0.0 || y > trials || y.fract() != 0.0 || trials <= 0.0 {
                    Err(bad())
                } else {
                    Ok(())
                }
            }
        }
    }

    /// `c(y)` of the density; constant in the parameters.
    pub fn base_measure(&self, y: f64, trials: f64) -> f64 {
        match *self {
            Family::Gaussian => -0.5 * y * y - 0.5 * (2.0 * std::f64::consts::PI).ln(),
            Family::Poisson => -ln_gamma(y + 1.0),
            Family::Binomial => ln_binomial(trials as u64, y as u64),
            Family::NegativeBinomial { theta } => {
                ln_gamma(y + theta) - ln_gamma(theta) - ln_gamma(y + 1.0)
            }
        }
    }

    /// Log density at natural parameter `eta`.
    pub fn log_density(&self, y: f64, eta: f64, trials: f64) -> f64 {
        (y * eta - self.cumulant(eta, trials)) / self.dispersion() + self.base_measure(y, trials)
    }

    /// Unit deviance `2 * (l(y; y) - l(y; mu))`.
    pub fn unit_deviance(&self, y: f64, mu: f64, trials: f64) -> f64 {
        match *self {
            Family::Gaussian => (y - mu) * (y - mu),
            Family::Poisson => 2.0 * (xlogy(y, y / mu) - (y - mu)),
            Family::Binomial => {
                let f = trials - y;
                2.0 * (xlogy(y, y / mu) + xlogy(f, f / (trials - mu)))
            }
            Family::NegativeBinomial { theta } => {
                2.0 * (xlogy(y, y / mu) - (y + theta) * ((y + theta) / (mu + theta)).ln())
            }
        }
    }

    /// IRLS starting mean, following the usual GLM conventions.
    pub fn initial_mean(&self, y: f64, trials: f64) -> f64 {
        match self {
            Family::Gaussian => y,
            Family::Poisson | Family::NegativeBinomial { .. } => y + 0.1,
            Family::Binomial => trials * (y + 0.5) / (trials + 1.0),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::NegativeBinomial { theta } => write!(f, "negative-binomial(theta={theta})"),
            other => f.write_str(other.name()),
        }
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}
