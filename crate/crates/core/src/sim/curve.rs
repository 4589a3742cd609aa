//! Rejection-probability curves and their CSV form.

use std::io::Write;
use std::path::Path;

use super::config::Scenario;
use crate::error::{Error, Result};

/// A replication that was dropped because one of its tests failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcludedRep {
    pub rep: usize,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectionCurve {
    pub scenario: Scenario,
    pub alpha: Vec<f64>,
    pub methods: Vec<String>,
    /// `rates[m][a]`: fraction of retained reps with `p <= alpha[a]` for method `m`.
    pub rates: Vec<Vec<f64>>,
    /// Requested replications, including excluded ones.
    pub reps: usize,
    /// `p_values[m]` holds one p-value per retained rep.
    pub p_values: Vec<Vec<f64>>,
    pub excluded: Vec<ExcludedRep>,
}

fn rate(p: &[f64], alpha: f64) -> f64 {
    p.iter().filter(|&&v| v <= alpha).count() as f64 / p.len() as f64
}

impl RejectionCurve {
    pub fn from_p_values(
        scenario: Scenario,
        alpha: Vec<f64>,
        methods: Vec<String>,
        p_values: Vec<Vec<f64>>,
        reps: usize,
        excluded: Vec<ExcludedRep>,
    ) -> Result<Self> {
        if p_values.len() != methods.len() {
            return Err(Error::InvalidInput("one p-value column per method expected".into()));
        }
        if let Some(first) = p_values.first() {
            if first.is_empty() {
                return Err(excluded
                    .first()
                    .map(|e| e.error.clone())
                    .unwrap_or_else(|| Error::InvalidInput("no replications".into())));
            }
        }
        let rates = p_values
            .iter()
            .map(|p| alpha.iter().map(|&a| rate(p, a)).collect())
            .collect();
        Ok(Self {
            scenario,
            alpha,
            methods,
            rates,
            reps,
            p_values,
            excluded,
        })
    }

    pub fn retained(&self) -> usize {
        self.p_values.first().map_or(0, Vec::len)
    }

    pub fn method_index(&self, method: &str) -> Option<usize> {
        self.methods.iter().position(|m| m == method)
    }

    /// Rejection rate at any `alpha`, computed from the stored p-values.
    pub fn rate_at(&self, method: &str, alpha: f64) -> Option<f64> {
        self.method_index(method).map(|m| rate(&self.p_values[m], alpha))
    }

    /// Binomial standard error of a rate over the retained reps.
    pub fn standard_error(&self, rate: f64) -> f64 {
        (rate * (1.0 - rate) / self.retained() as f64).sqrt()
    }
}

/// `x` rounded to 6 significant digits, without trailing zeros.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_curve<W: Write>(curve: &RejectionCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["alpha".to_string()];
    header.extend(curve.methods.iter().cloned());
    w.write_record(&header)?;
    for (a, &alpha) in curve.alpha.iter().enumerate() {
        let mut row = vec![format_sig6(alpha)];
        row.extend(curve.rates.iter().map(|r| format_sig6(r[a])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve_csv(curve: &RejectionCurve, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_curve(curve, std::io::BufWriter::new(file))
}
