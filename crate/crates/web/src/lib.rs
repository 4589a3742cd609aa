//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON document; the `*_json` functions hold the
//! logic so they can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use flipscore::baselines::{parametric_score_from_scores, quasi_score_test, sandwich_wald_test};
use flipscore::data::warpbreaks;
use flipscore::flip::{
    flip_statistics, flip_test_scores, p_value, Alternative, FlipOptions, ScoreMethod, TestResult,
    VhatChoice,
};
use flipscore::glm::{build_design, fit_null, score_contributions, DesignMatrix, Family};
use flipscore::sim::{run_scenario, Scenario, SimConfig};

/// Upper bound on flips per call, to keep the page responsive.
pub const MAX_W: usize = 200_000;
/// Upper bound on simulated replications per call.
pub const MAX_REPS: usize = 2000;

#[derive(Serialize)]
struct Row {
    method: &'static str,
    statistic: f64,
    p_value: f64,
    reject: bool,
}

impl From<&TestResult> for Row {
    fn from(r: &TestResult) -> Self {
        Row {
            method: r.method.as_str(),
            statistic: r.statistic,
            p_value: r.p_value,
            reject: r.reject,
        }
    }
}

fn wool_design() -> DesignMatrix {
    build_design(&warpbreaks(), "breaks", &["wool"], &["tension"], true, &[0.0])
        .expect("embedded data is well formed")
}

fn check_w(w: usize) -> Result<(), String> {
    if !(2..=MAX_W).contains(&w) {
        return Err(format!("w must lie in 2..={MAX_W}"));
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn warpbreaks_report_json(w: usize, seed: u64) -> Result<String, String> {
    check_w(w)?;
    let design = wool_design();
    let family = Family::Poisson;
    let fail = |e: flipscore::Error| e.to_string();
    let fit = fit_null(&design, family).map_err(fail)?;
    let scores = score_contributions(&fit, &design, family).map_err(fail)?;
    let two = Alternative::TwoSidedAbs;
    let mut opts = FlipOptions {
        w,
        seed,
        method: ScoreMethod::Basic,
        ..FlipOptions::default()
    };
    let plan = opts.plan(design.nrows()).map_err(fail)?;
    let mut rows = vec![
        parametric_score_from_scores(&scores, two, 0.05).map_err(fail)?,
        quasi_score_test(&design, family, two, 0.05).map_err(fail)?,
        sandwich_wald_test(&design, family, two, 0.05).map_err(fail)?,
        flip_test_scores(&scores, &opts, &plan).map_err(fail)?,
    ];
    opts.method = ScoreMethod::Effective;
    rows.push(flip_test_scores(&scores, &opts, &plan).map_err(fail)?);
    let rows: Vec<Row> = rows.iter().map(Row::from).collect();
    to_json(&serde_json::json!({ "w": w, "seed": seed, "rows": rows }))
}

#[derive(Serialize)]
struct Histogram {
    method: &'static str,
    observed: f64,
    p_value: f64,
    lo: f64,
    hi: f64,
    counts: Vec<usize>,
}

/// Histogram of the flip distribution for the warp-breaks wool effect.
pub fn flip_histogram_json(effective: bool, w: usize, seed: u64, bins: usize) -> Result<String, String> {
    check_w(w)?;
    if !(1..=500).contains(&bins) {
        return Err("bins must lie in 1..=500".into());
    }
    let design = wool_design();
    let fail = |e: flipscore::Error| e.to_string();
    let fit = fit_null(&design, Family::Poisson).map_err(fail)?;
    let scores = score_contributions(&fit, &design, Family::Poisson).map_err(fail)?;
    let method = if effective {
        ScoreMethod::Effective
    } else {
        ScoreMethod::Basic
    };
    let opts = FlipOptions {
        w,
        seed,
        method,
        ..FlipOptions::default()
    };
    let plan = opts.plan(design.nrows()).map_err(fail)?;
    let stats = flip_statistics(&scores, method, VhatChoice::Identity, &plan).map_err(fail)?;
    let lo = stats.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = stats.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in &stats.values {
        let b = if width > 0.0 {
            (((v - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[b] += 1;
    }
    to_json(&Histogram {
        method: method.method_tag().as_str(),
        observed: stats.observed(),
        p_value: p_value(&stats, Alternative::TwoSidedAbs),
        lo,
        hi,
        counts,
    })
}

/// Rejection curve of a simulation scenario on a 0.01-spaced alpha grid.
pub fn rejection_curve_json(scenario: &str, n: usize, reps: usize, w: usize, seed: u64) -> Result<String, String> {
    let scenario: Scenario = scenario.parse().map_err(|e: flipscore::Error| e.to_string())?;
    check_w(w)?;
    if !(1..=MAX_REPS).contains(&reps) {
        return Err(format!("reps must lie in 1..={MAX_REPS}"));
    }
    let cfg = SimConfig {
        n,
        reps,
        w,
        seed,
        ..SimConfig::new(scenario)
    };
    let curve = run_scenario(&cfg).map_err(|e| e.to_string())?;
    to_json(&serde_json::json!({
        "scenario": scenario.as_str(),
        "alpha": curve.alpha,
        "methods": curve.methods,
        "rates": curve.rates,
        "retained": curve.retained(),
        "excluded": curve.excluded.len(),
    }))
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn warpbreaks_report(w: usize, seed: u64) -> Result<String, JsError> {
    js(warpbreaks_report_json(w, seed))
}

#[wasm_bindgen]
pub fn flip_histogram(effective: bool, w: usize, seed: u64, bins: usize) -> Result<String, JsError> {
    js(flip_histogram_json(effective, w, seed, bins))
}

#[wasm_bindgen]
pub fn rejection_curve(scenario: &str, n: usize, reps: usize, w: usize, seed: u64) -> Result<String, JsError> {
    js(rejection_curve_json(scenario, n, reps, w, seed))
}
