use std::io::Write;

use flipscore::baselines::{parametric_score_from_scores, quasi_score_test, sandwich_wald_test};
use flipscore::data::warpbreaks as embedded_warpbreaks;
use flipscore::flip::{
    flip_test_scores, Alternative, FlipOptions, SamplingMode, ScoreMethod, TestResult, VhatChoice,
};
use flipscore::glm::{build_design, fit_null, score_contributions, DesignMatrix, Family};
use flipscore::sim::{run_scenario, write_curve, write_curve_csv, Scenario, SimConfig};
use flipscore::table::Table;
use flipscore::Error;

use crate::args::{MethodArg, SimulateArgs, TestArgs, WarpbreaksArgs};
use crate::report;
use crate::CliError;

fn flag(name: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("--{name}: {e}"))
}

fn load(path: &std::path::Path) -> Result<Table, CliError> {
    Table::from_csv_path(path).map_err(|e| flag("data", e))
}

/// Builds the design, attributing column errors to the flag that named the column.
fn design_from(
    table: &Table,
    response: &str,
    tested: &[String],
    nuisance: &[String],
    intercept: bool,
    null_value: &[f64],
) -> Result<DesignMatrix, CliError> {
    let t: Vec<&str> = tested.iter().map(String::as_str).collect();
    let z: Vec<&str> = nuisance.iter().map(String::as_str).collect();
    build_design(table, response, &t, &z, intercept, null_value).map_err(|e| match &e {
        Error::UnknownColumn(c) | Error::ConstantTestedColumn(c) => {
            let which = if c == response {
                "response"
            } else if nuisance.contains(c) {
                "nuisance"
            } else {
                "tested"
            };
            flag(which, e)
        }
        Error::RankDeficient => flag("nuisance", e),
        Error::InvalidInput(_) => flag("null", e),
        _ => CliError::from(e),
    })
}

/// Runs `methods` on one design; flip methods share a single plan.
fn run_methods(
    design: &DesignMatrix,
    family: Family,
    methods: &[MethodArg],
    opts: &FlipOptions,
) -> Result<Vec<TestResult>, CliError> {
    let fit = fit_null(design, family)?;
    let scores = score_contributions(&fit, design, family)?;
    let needs_plan = methods
        .iter()
        .any(|m| matches!(m, MethodArg::Basic | MethodArg::Effective));
    let plan = if needs_plan {
        Some(opts.plan(design.nrows()).map_err(|e| flag("w", e))?)
    } else {
        None
    };
    let alt = opts.alternative;
    let alpha = opts.alpha;
    let mut results = Vec::new();
    for m in methods {
        let r = match m {
            MethodArg::Basic | MethodArg::Effective => {
                let method = if *m == MethodArg::Basic {
                    ScoreMethod::Basic
                } else {
                    ScoreMethod::Effective
                };
                let o = FlipOptions { method, ..*opts };
                flip_test_scores(&scores, &o, plan.as_ref().expect("plan built"))?
            }
            MethodArg::Parametric => parametric_score_from_scores(&scores, alt, alpha)?,
            MethodArg::Sandwich => sandwich_wald_test(design, family, alt, alpha)?,
            MethodArg::Quasi => quasi_score_test(design, family, alt, alpha)?,
            MethodArg::All => unreachable!("expanded by the caller"),
        };
        results.push(r);
    }
    Ok(results)
}

fn print(results: &[TestResult], json: bool, single: bool) {
    let text = if json {
        report::json(results) + "\n"
    } else if single {
        report::single(&results[0])
    } else {
        report::table(results)
    };
    print!("{text}");
}

pub fn test(a: &TestArgs) -> Result<(), CliError> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(flag("alpha", format!("{} is outside (0, 1)", a.alpha)));
    }
    let family = Family::parse(&a.family).map_err(|e| flag("family", e))?;
    family.check_fittable().map_err(|e| flag("family", e))?;
    let mode: SamplingMode = a.mode.parse().map_err(|e| flag("mode", e))?;
    let vhat: VhatChoice = a.vhat.parse().map_err(|e| flag("vhat", e))?;
    let mut alternative: Alternative = a.alternative.parse().map_err(|e| flag("alternative", e))?;
    if let Alternative::TwoSidedTails { .. } = alternative {
        alternative = Alternative::equal_tails(a.alpha, a.w);
    }
    if a.w < 2 {
        return Err(flag("w", "need at least 2 flips"));
    }
    if !a.null_value.is_empty() && a.null_value.len() != a.tested.len() {
        return Err(flag(
            "null",
            format!("{} values for {} tested names", a.null_value.len(), a.tested.len()),
        ));
    }
    let table = load(&a.data)?;
    let design = design_from(
        &table,
        &a.response,
        &a.tested,
        &a.nuisance,
        a.intercept,
        &a.null_value,
    )?;
    let opts = FlipOptions {
        method: ScoreMethod::Effective,
        alternative,
        alpha: a.alpha,
        w: a.w,
        mode,
        seed: a.seed,
        vhat,
    };
    let methods = match a.method {
        MethodArg::All => vec![
            MethodArg::Parametric,
            MethodArg::Quasi,
            MethodArg::Sandwich,
            MethodArg::Basic,
            MethodArg::Effective,
        ],
        m => vec![m],
    };
    if methods.contains(&MethodArg::Quasi) && family != Family::Poisson {
        return Err(flag("method", "quasi requires --family poisson"));
    }
    let results = run_methods(&design, family, &methods, &opts)?;
    print(&results, a.json, methods.len() == 1);
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let mut cfg = match (&a.config, &a.scenario) {
        (Some(path), _) => SimConfig::from_kv_path(path).map_err(|e| flag("config", e))?,
        (None, Some(_)) => SimConfig::new(Scenario::HeteroT),
        (None, None) => {
            return Err(flag(
                "scenario",
                format!("required (valid: {})", Scenario::names()),
            ))
        }
    };
    if let Some(s) = &a.scenario {
        let scenario: Scenario = s.parse().map_err(|e| flag("scenario", e))?;
        if a.config.is_none() {
            cfg = SimConfig::new(scenario);
        } else {
            cfg.scenario = scenario;
        }
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(r) = a.reps {
        cfg.reps = r;
    }
    if let Some(w) = a.w {
        cfg.w = w;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let curve = run_scenario(&cfg)?;
    match &a.out {
        Some(path) => write_curve_csv(&curve, path).map_err(|e| flag("out", e))?,
        None => {
            let stdout = std::io::stdout();
            write_curve(&curve, stdout.lock())?;
        }
    }
    let mut err = std::io::stderr().lock();
    let _ = writeln!(
        err,
        "{}: {} of {} reps retained",
        cfg.scenario,
        curve.retained(),
        curve.reps
    );
    for m in &curve.methods {
        let rates: Vec<String> = [0.01, 0.05, 0.1]
            .iter()
            .map(|&alpha| format!("{alpha}: {:.4}", curve.rate_at(m, alpha).unwrap_or(f64::NAN)))
            .collect();
        let _ = writeln!(err, "  {m:<12} {}", rates.join("  "));
    }
    for x in &curve.excluded {
        let _ = writeln!(err, "  excluded rep {}: {}", x.rep, x.error);
    }
    Ok(())
}

pub fn warpbreaks(a: &WarpbreaksArgs) -> Result<(), CliError> {
    if a.w < 2 {
        return Err(flag("w", "need at least 2 flips"));
    }
    let table = match &a.data {
        Some(p) => load(p)?,
        None => embedded_warpbreaks(),
    };
    let design = design_from(
        &table,
        "breaks",
        &["wool".to_string()],
        &["tension".to_string()],
        true,
        &[0.0],
    )?;
    let opts = FlipOptions {
        w: a.w,
        seed: a.seed,
        ..FlipOptions::default()
    };
    let methods = [
        MethodArg::Parametric,
        MethodArg::Quasi,
        MethodArg::Sandwich,
        MethodArg::Basic,
        MethodArg::Effective,
    ];
    let results = run_methods(&design, Family::Poisson, &methods, &opts)?;
    if !a.json {
        println!("breaks ~ wool + tension (poisson), H0: woolB = 0, two-sided");
    }
    print(&results, a.json, false);
    Ok(())
}
