//! Scenario configuration and its flat `key = value` file format.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::generate::SigmaRule;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    OverdispersedNuisance,
    IgnoredLatent,
    PowerCorrectModel,
    HeteroT,
    Multivariate,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::OverdispersedNuisance,
        Scenario::IgnoredLatent,
        Scenario::PowerCorrectModel,
        Scenario::HeteroT,
        Scenario::Multivariate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::OverdispersedNuisance => "overdispersed-nuisance",
            Scenario::IgnoredLatent => "ignored-latent",
            Scenario::PowerCorrectModel => "power-correct-model",
            Scenario::HeteroT => "hetero-t",
            Scenario::Multivariate => "multivariate",
        }
    }

    pub fn names() -> String {
        Self::ALL.map(|s| s.as_str()).join(", ")
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown scenario `{s}` (valid: {})",
                    Self::names()
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub reps: usize,
    pub w: usize,
    pub seed: u64,
    /// Tested effect; one entry per tested covariate.
    pub beta: Vec<f64>,
    /// Nuisance covariate effects, same length as `beta`.
    pub gamma0: Vec<f64>,
    pub gamma0_latent: f64,
    pub rho: f64,
    /// Negative-binomial dispersion; `None` draws Poisson responses.
    pub theta: Option<f64>,
    /// Noise rule for `hetero-t`.
    pub sigma: SigmaRule,
    pub alpha_grid: Vec<f64>,
}

pub fn default_alpha_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

impl SimConfig {
    /// Settings of the published experiment for each scenario, at desk-scale reps.
    pub fn new(scenario: Scenario) -> Self {
        let base = SimConfig {
            scenario,
            n: 200,
            reps: 2000,
            w: 200,
            seed: 1,
            beta: vec![0.0],
            gamma0: vec![1.0],
            gamma0_latent: 0.0,
            rho: 0.5,
            theta: Some(1.0),
            sigma: SigmaRule::ExpIndex,
            alpha_grid: default_alpha_grid(),
        };
        match scenario {
            Scenario::OverdispersedNuisance => base,
            Scenario::IgnoredLatent => SimConfig {
                gamma0_latent: 1.0,
                ..base
            },
            Scenario::PowerCorrectModel => SimConfig {
                w: 1000,
                beta: vec![0.2],
                theta: None,
                ..base
            },
            Scenario::HeteroT => SimConfig {
                n: 10,
                w: 1000,
                gamma0: vec![],
                rho: 0.0,
                theta: None,
                ..base
            },
            Scenario::Multivariate => SimConfig {
                n: 50,
                w: 1000,
                beta: vec![0.0; 5],
                gamma0: vec![0.5, 0.2, 0.0, 0.0, 0.0],
                gamma0_latent: 0.5,
                theta: Some(2.0),
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.reps < 1 {
            return bad("reps must be at least 1".into());
        }
        if self.w < 2 {
            return bad(format!("w must be at least 2, got {}", self.w));
        }
        if self.alpha_grid.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return bad("alpha_grid values must lie in (0, 1)".into());
        }
        if self.alpha_grid.windows(2).any(|p| p[0] >= p[1]) {
            return bad("alpha_grid must be strictly increasing".into());
        }
        if let Some(t) = self.theta {
            if !(t > 0.0) {
                return bad(format!("theta must be positive, got {t}"));
            }
        }
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return bad(format!("rho must lie in (-1, 1), got {}", self.rho));
        }
        if let SigmaRule::Constant(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("sigma must be positive, got {s}"));
            }
        }
        let d = self.beta.len();
        match self.scenario {
            Scenario::HeteroT => {
                if d != 1 {
                    return bad("hetero-t needs a scalar beta (the mean)".into());
                }
                if self.n < 2 {
                    return bad("hetero-t needs n >= 2".into());
                }
            }
            Scenario::Multivariate => {
                if d < 1 || self.gamma0.len() != d {
                    return bad(format!(
                        "multivariate needs beta and gamma0 of equal length, got {} and {}",
                        d,
                        self.gamma0.len()
                    ));
                }
            }
            _ => {
                if d != 1 || self.gamma0.len() != 1 {
                    return bad(format!("{} needs scalar beta and gamma0", self.scenario));
                }
            }
        }
        if self.scenario != Scenario::HeteroT {
            let k = 1 + 2 * d;
            if self.n <= k {
                return bad(format!("n = {} is too small for {k} coefficients", self.n));
            }
            if self.scenario == Scenario::Multivariate {
                // the 2d observed covariates share one equicorrelation matrix
                let lower = -1.0 / (2 * d - 1) as f64;
                if self.rho <= lower {
                    return bad(format!("rho must exceed {lower} for {} covariates", 2 * d));
                }
            }
        }
        Ok(())
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let num = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("`{key}`: `{v}` is not a number")))
        };
        let list = |v: &str| -> Result<Vec<f64>> {
            if v.is_empty() {
                return Ok(vec![]);
            }
            v.split(',').map(num).collect()
        };
        let int = |v: &str| -> Result<u64> {
            v.parse::<u64>()
                .map_err(|_| Error::InvalidInput(format!("`{key}`: `{v}` is not an integer")))
        };
        match key {
            "scenario" => self.scenario = value.parse()?,
            "n" => self.n = int(value)? as usize,
            "reps" => self.reps = int(value)? as usize,
            "w" => self.w = int(value)? as usize,
            "seed" => self.seed = int(value)?,
            "beta" => self.beta = list(value)?,
            "gamma0" => self.gamma0 = list(value)?,
            "gamma0_latent" => self.gamma0_latent = num(value)?,
            "rho" => self.rho = num(value)?,
            "theta" => {
                self.theta = match value {
                    "inf" | "none" | "poisson" => None,
                    v => Some(num(v)?),
                }
            }
            "sigma" => {
                self.sigma = match value {
                    "exp-index" => SigmaRule::ExpIndex,
                    v => SigmaRule::Constant(num(v)?),
                }
            }
            "alpha_grid" => self.alpha_grid = list(value)?,
            other => {
                return Err(Error::InvalidInput(format!("unknown config key `{other}`")));
            }
        }
        Ok(())
    }

    /// Parses a `key = value` file. The scenario line picks the defaults;
    /// the remaining keys override them in any order.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!("line {}: expected key = value", lineno + 1))
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let scenario = pairs
            .iter()
            .find(|(k, _)| k == "scenario")
            .ok_or_else(|| Error::InvalidInput("config has no `scenario` key".into()))?
            .1
            .parse()?;
        let mut cfg = SimConfig::new(scenario);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_kv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_kv_str(&std::fs::read_to_string(path)?)
    }
}
