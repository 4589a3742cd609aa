//! Monte-Carlo studies of level and power.

mod config;
mod curve;
mod generate;
mod scenario;

pub use config::{default_alpha_grid, Scenario, SimConfig};
pub use curve::{format_sig6, write_curve, write_curve_csv, ExcludedRep, RejectionCurve};
pub use generate::{
    correlation_factor, equicorrelation, gen_hetero_normal, gen_mvn_covariates, gen_negbin_response,
    hetero_normal, mvn_rows, negbin_draw, negbin_response, poisson_draw, SigmaRule,
};
pub use scenario::{
    glm_replicate, hetero_replicate, method_names, plan_seed, replicate_plan, run_scenario,
    GLM_METHODS, HETERO_METHODS,
};
