use flipscore::sim::{
    run_scenario, write_curve_csv, RejectionCurve, Scenario, SimConfig,
};

fn cfg(scenario: Scenario, reps: usize, seed: u64) -> SimConfig {
    SimConfig {
        reps,
        seed,
        ..SimConfig::new(scenario)
    }
}

#[test]
fn overdispersed_nuisance_level() {
    let c = run_scenario(&cfg(Scenario::OverdispersedNuisance, 2000, 3)).unwrap();
    let eff = c.rate_at("flipEff", 0.05).unwrap();
    assert!((eff - 0.05).abs() <= 0.015, "flipEff {eff}");
    assert!(c.rate_at("par", 0.05).unwrap() > 0.10);
}

#[test]
fn ignored_latent_basic_flip_is_conservative() {
    let c = run_scenario(&cfg(Scenario::IgnoredLatent, 2000, 4)).unwrap();
    let simple = c.rate_at("flipSimple", 0.05).unwrap();
    assert!(simple < 0.05 + 3.0 * c.standard_error(0.05), "flipSimple {simple}");
    assert!(simple < 0.05, "flipSimple {simple}");
}

#[test]
fn power_under_the_correct_model() {
    let c = run_scenario(&cfg(Scenario::PowerCorrectModel, 2000, 5)).unwrap();
    let eff = c.rate_at("flipEff", 0.05).unwrap();
    let par = c.rate_at("par", 0.05).unwrap();
    let simple = c.rate_at("flipSimple", 0.05).unwrap();
    assert!((eff - par).abs() <= 0.03, "flipEff {eff} par {par}");
    assert!(simple <= eff + 3.0 * c.standard_error(eff), "flipSimple {simple} flipEff {eff}");
}

#[test]
fn heteroscedastic_null_curve() {
    let c = run_scenario(&SimConfig {
        alpha_grid: (1..20).map(|k| k as f64 / 20.0).collect(),
        ..cfg(Scenario::HeteroT, 5000, 6)
    })
    .unwrap();
    let flip = c.method_index("Flip test").unwrap();
    let t = c.method_index("Parametric").unwrap();
    let mut gross = false;
    for (a, &alpha) in c.alpha.iter().enumerate() {
        let r = c.rates[flip][a];
        assert!((r - alpha).abs() < 3.0 * c.standard_error(alpha), "alpha {alpha}: {r}");
        let rt = c.rates[t][a];
        gross |= (alpha <= 0.1 && rt > 2.0 * alpha) || rt < 0.5 * alpha;
    }
    assert!(gross);
}

#[test]
fn multivariate_sandwich_is_anticonservative() {
    let c = run_scenario(&cfg(Scenario::Multivariate, 1000, 7)).unwrap();
    let gee = c.rate_at("GEE", 0.01).unwrap();
    let eff = c.rate_at("flipEff", 0.01).unwrap();
    assert!(gee > 0.1, "GEE {gee}");
    assert!(eff < gee / 4.0, "flipEff {eff} GEE {gee}");
}

fn read_back(path: &std::path::Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn sig6(x: f64) -> f64 {
    format!("{x:.5e}").parse().unwrap()
}

#[test]
fn curve_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let c = run_scenario(&SimConfig {
        n: 50,
        w: 100,
        ..cfg(Scenario::OverdispersedNuisance, 100, 8)
    })
    .unwrap();
    let path = dir.path().join("curve.csv");
    write_curve_csv(&c, &path).unwrap();
    let (header, rows) = read_back(&path);
    assert_eq!(header, ["alpha", "par", "GEE", "flipSimple", "flipEff"]);
    assert_eq!(rows.len(), c.alpha.len());
    for (a, row) in rows.iter().enumerate() {
        assert_eq!(row[0], sig6(c.alpha[a]));
        for m in 0..4 {
            assert_eq!(row[m + 1], sig6(c.rates[m][a]));
        }
    }

    let h = run_scenario(&SimConfig {
        alpha_grid: vec![],
        ..cfg(Scenario::HeteroT, 10, 1)
    })
    .unwrap();
    let path = dir.path().join("empty.csv");
    write_curve_csv(&h, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "alpha,Parametric,Flip test\n");
}

#[test]
fn single_rep_is_a_step_function() {
    let c: RejectionCurve = run_scenario(&cfg(Scenario::HeteroT, 1, 2)).unwrap();
    for r in &c.rates {
        assert!(r.iter().all(|&v| v == 0.0 || v == 1.0));
    }
}
