use serde::Serialize;

use flipscore::flip::TestResult;

#[derive(Serialize)]
pub struct JsonResult {
    pub method: &'static str,
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub w: Option<usize>,
    pub seed: Option<u64>,
}

impl From<&TestResult> for JsonResult {
    fn from(r: &TestResult) -> Self {
        Self {
            method: r.method.as_str(),
            statistic: r.statistic,
            p_value: r.p_value,
            reject: r.reject,
            alpha: r.alpha,
            w: r.w,
            seed: r.seed,
        }
    }
}

/// Same digits as the JSON document, so printed values can be matched exactly.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

pub fn json(results: &[TestResult]) -> String {
    let rows: Vec<JsonResult> = results.iter().map(JsonResult::from).collect();
    let doc = if rows.len() == 1 {
        serde_json::to_string_pretty(&rows[0])
    } else {
        serde_json::to_string_pretty(&rows)
    };
    doc.expect("plain numbers serialize")
}

pub fn single(r: &TestResult) -> String {
    let mut out = String::new();
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    out += &format!("method       {}\n", r.method);
    out += &format!("alternative  {}\n", r.alternative);
    out += &format!("statistic    {}\n", num(r.statistic));
    out += &format!("p-value      {}\n", num(r.p_value));
    out += &format!(
        "decision     {} at alpha = {}\n",
        if r.reject { "reject" } else { "do not reject" },
        r.alpha
    );
    out += &format!("w            {}\n", opt(r.w.map(|w| w.to_string())));
    out += &format!("seed         {}\n", opt(r.seed.map(|s| s.to_string())));
    out
}

pub fn table(results: &[TestResult]) -> String {
    let mut out = format!("{:<16}{:>24}{:>24}  {}\n", "method", "statistic", "p-value", "reject");
    for r in results {
        out += &format!(
            "{:<16}{:>24}{:>24}  {}\n",
            r.method.as_str(),
            num(r.statistic),
            num(r.p_value),
            if r.reject { "yes" } else { "no" }
        );
    }
    if let Some(r) = results.iter().find(|r| r.w.is_some()) {
        out += &format!(
            "alpha = {}, w = {}, seed = {}\n",
            r.alpha,
            r.w.unwrap_or(0),
            r.seed.map_or("-".into(), |s| s.to_string())
        );
    }
    out
}
