//! Replication loop: generate data, run the four tests, collect p-values.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::config::{Scenario, SimConfig};
use super::curve::{ExcludedRep, RejectionCurve};
use super::generate::{correlation_factor, equicorrelation, hetero_normal, mvn_rows, negbin_draw, poisson_draw};
use crate::baselines::{one_sample_t, parametric_score_from_scores, sandwich_wald_test};
use crate::error::Result;
use crate::flip::{flip_test_scores, Alternative, FlipOptions, FlipPlan, SamplingMode, ScoreMethod, VhatChoice};
use crate::glm::{fit_null, score_contributions, DesignMatrix, Family, INTERCEPT};
use crate::rng::{derive_seed, stream};

const DATA_LABEL: u64 = 0;
const PLAN_LABEL: u64 = 1;

pub const GLM_METHODS: [&str; 4] = ["par", "GEE", "flipSimple", "flipEff"];
pub const HETERO_METHODS: [&str; 2] = ["Parametric", "Flip test"];

pub fn method_names(scenario: Scenario) -> Vec<String> {
    let names: &[&str] = match scenario {
        Scenario::HeteroT => &HETERO_METHODS,
        _ => &GLM_METHODS,
    };
    names.iter().map(|s| s.to_string()).collect()
}

/// Seed of the flip plan used in replication `rep`.
pub fn plan_seed(cfg: &SimConfig, rep: usize) -> u64 {
    derive_seed(derive_seed(cfg.seed, PLAN_LABEL), rep as u64)
}

/// Design and response of replication `rep` of a GLM scenario.
///
/// Columns are the intercept, the nuisance covariates `Z` and the tested
/// covariates `X`; the latent covariate is never part of the design.
pub fn glm_replicate(cfg: &SimConfig, factor: &DMatrix<f64>, rep: usize) -> Result<DesignMatrix> {
    let mut rng = stream(derive_seed(cfg.seed, DATA_LABEL), rep as u64);
    let d = cfg.beta.len();
    let n = cfg.n;
    let xz = mvn_rows(n, factor, &mut rng);
    let latent: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let mut eta = cfg.gamma0_latent * latent[i];
            for j in 0..d {
                eta += cfg.beta[j] * xz[(i, j)] + cfg.gamma0[j] * xz[(i, d + j)];
            }
            match cfg.theta {
                Some(theta) => negbin_draw(eta.exp(), theta, &mut rng),
                None => poisson_draw(eta.exp(), &mut rng),
            }
        })
        .collect();
    let x = DMatrix::from_fn(n, 1 + 2 * d, |i, c| match c {
        0 => 1.0,
        c if c <= d => xz[(i, d + c - 1)],
        c => xz[(i, c - d - 1)],
    });
    let mut names = vec![INTERCEPT.to_string()];
    names.extend((1..=d).map(|j| format!("Z{j}")));
    names.extend((1..=d).map(|j| format!("X{j}")));
    DesignMatrix::new(x, names, (d + 1..=2 * d).collect(), y, vec![])
}

fn flip_options(cfg: &SimConfig, rep: usize, method: ScoreMethod) -> FlipOptions {
    FlipOptions {
        method,
        alternative: Alternative::TwoSidedAbs,
        alpha: 0.05,
        w: cfg.w,
        mode: SamplingMode::WithReplacement,
        seed: plan_seed(cfg, rep),
        vhat: VhatChoice::Identity,
    }
}

fn glm_rep(cfg: &SimConfig, factor: &DMatrix<f64>, rep: usize) -> Result<Vec<f64>> {
    let design = glm_replicate(cfg, factor, rep)?;
    let family = Family::Poisson;
    let fit = fit_null(&design, family)?;
    let scores = score_contributions(&fit, &design, family)?;
    let two = Alternative::TwoSidedAbs;
    let par = parametric_score_from_scores(&scores, two, 0.05)?;
    let gee = sandwich_wald_test(&design, family, two, 0.05)?;
    let basic = flip_options(cfg, rep, ScoreMethod::Basic);
    let plan = basic.plan(cfg.n)?;
    let simple = flip_test_scores(&scores, &basic, &plan)?;
    let eff = flip_test_scores(&scores, &flip_options(cfg, rep, ScoreMethod::Effective), &plan)?;
    Ok(vec![par.p_value, gee.p_value, simple.p_value, eff.p_value])
}

/// Response of replication `rep` of the heteroscedastic scenario.
pub fn hetero_replicate(cfg: &SimConfig, rep: usize) -> Vec<f64> {
    let mut rng = stream(derive_seed(cfg.seed, DATA_LABEL), rep as u64);
    hetero_normal(cfg.n, cfg.beta[0], cfg.sigma, &mut rng)
}

fn hetero_rep(cfg: &SimConfig, rep: usize) -> Result<Vec<f64>> {
    let y = hetero_replicate(cfg, rep);
    let t = one_sample_t(&y, 0.0, Alternative::TwoSidedAbs, 0.05)?;
    // unit-variance gaussian model with x = 1: the scores are the observations
    let design = DesignMatrix::new(
        DMatrix::from_element(cfg.n, 1, 1.0),
        vec!["x".into()],
        vec![0],
        y,
        vec![],
    )?;
    let fit = fit_null(&design, Family::Gaussian)?;
    let scores = score_contributions(&fit, &design, Family::Gaussian)?;
    let opts = flip_options(cfg, rep, ScoreMethod::Basic);
    let flip = flip_test_scores(&scores, &opts, &opts.plan(cfg.n)?)?;
    Ok(vec![t.p_value, flip.p_value])
}

fn map_reps<F>(reps: usize, f: F) -> Vec<Result<Vec<f64>>>
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..reps).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..reps).map(f).collect()
    }
}

/// Runs all replications of a scenario and evaluates the rejection curve.
///
/// A replication in which any test fails is excluded for every method and
/// listed in `excluded`.
pub fn run_scenario(cfg: &SimConfig) -> Result<RejectionCurve> {
    cfg.validate()?;
    let methods = method_names(cfg.scenario);
    let results = match cfg.scenario {
        Scenario::HeteroT => map_reps(cfg.reps, |rep| hetero_rep(cfg, rep)),
        _ => {
            let factor = correlation_factor(&equicorrelation(2 * cfg.beta.len(), cfg.rho))?;
            map_reps(cfg.reps, |rep| glm_rep(cfg, &factor, rep))
        }
    };
    let mut p_values = vec![Vec::with_capacity(cfg.reps); methods.len()];
    let mut excluded = Vec::new();
    for (rep, r) in results.into_iter().enumerate() {
        match r {
            Ok(ps) => {
                for (col, p) in p_values.iter_mut().zip(ps) {
                    col.push(p);
                }
            }
            Err(error) => excluded.push(ExcludedRep { rep, error }),
        }
    }
    RejectionCurve::from_p_values(
        cfg.scenario,
        cfg.alpha_grid.clone(),
        methods,
        p_values,
        cfg.reps,
        excluded,
    )
}

/// Flip plan shared by the flip tests of replication `rep`.
pub fn replicate_plan(cfg: &SimConfig, rep: usize) -> Result<FlipPlan> {
    FlipPlan::new(cfg.n, cfg.w, SamplingMode::WithReplacement, plan_seed(cfg, rep))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(scenario: Scenario) -> SimConfig {
        SimConfig {
            reps: 40,
            w: 100,
            ..SimConfig::new(scenario)
        }
    }

    #[test]
    fn curves_are_monotone_and_bounded() {
        for s in Scenario::ALL {
            let c = run_scenario(&small(s)).unwrap();
            assert_eq!(c.methods, method_names(s));
            assert_eq!(c.retained() + c.excluded.len(), 40);
            for r in &c.rates {
                assert!(r.iter().all(|v| (0.0..=1.0).contains(v)));
                assert!(r.windows(2).all(|p| p[0] <= p[1]));
            }
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = small(Scenario::OverdispersedNuisance);
        assert_eq!(run_scenario(&cfg).unwrap(), run_scenario(&cfg).unwrap());
        let other = SimConfig { seed: 2, ..cfg.clone() };
        assert_ne!(run_scenario(&cfg).unwrap().p_values, run_scenario(&other).unwrap().p_values);
    }

    #[test]
    fn replicate_layout() {
        let cfg = SimConfig::new(Scenario::Multivariate);
        let factor = correlation_factor(&equicorrelation(10, 0.5)).unwrap();
        let d = glm_replicate(&cfg, &factor, 3).unwrap();
        assert_eq!(d.ncols(), 11);
        assert_eq!(d.tested(), &[6, 7, 8, 9, 10]);
        assert_eq!(d.names()[1], "Z1");
        assert_eq!(d.names()[6], "X1");
        assert_eq!(replicate_plan(&cfg, 3).unwrap().w(), 1000);
    }
}
