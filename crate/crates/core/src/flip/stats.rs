//! Flip statistics `T_1, ..., T_w`, scalar and quadratic-form.

use nalgebra::DMatrix;

use super::plan::FlipPlan;
use crate::error::{Error, Result};
use crate::linalg::check_psd;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatKind {
    Scalar,
    Quadratic,
}

/// Flip statistics in plan order; `values[0]` is the observed statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct StatVector {
    pub values: Vec<f64>,
    pub kind: StatKind,
    /// Which weight matrix was used, for quadratic statistics.
    pub vhat_tag: Option<String>,
}

impl StatVector {
    pub fn observed(&self) -> f64 {
        self.values[0]
    }
    pub fn w(&self) -> usize {
        self.values.len()
    }
}

/// `sum_i g_ji c_i` with the row given as packed negative-sign bits.
#[inline]
fn signed_sum(bits: &[u64], contribs: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, &c) in contribs.iter().enumerate() {
        let neg = bits[i / 64] >> (i % 64) & 1;
        acc += f64::from_bits(c.to_bits() ^ (neg << 63));
    }
    acc
}

fn per_row<F>(w: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..w).into_par_iter().with_min_len(1024).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..w).map(f).collect()
    }
}

fn check_len(n: usize, plan: &FlipPlan) -> Result<()> {
    if n != plan.n() {
        return Err(Error::InvalidInput(format!(
            "{n} contributions for a plan over {} observations",
            plan.n()
        )));
    }
    Ok(())
}

/// `T_j = n^{-1/2} sum_i g_ji c_i`.
pub fn flip_statistics_scalar(contribs: &[f64], plan: &FlipPlan) -> Result<StatVector> {
    check_len(contribs.len(), plan)?;
    let scale = (contribs.len() as f64).sqrt().recip();
    let values = per_row(plan.w(), |j| signed_sum(plan.row_bits(j), contribs) * scale);
    Ok(StatVector {
        values,
        kind: StatKind::Scalar,
        vhat_tag: None,
    })
}

/// `T_j = s_j' V s_j` with `s_j = n^{-1/2} sum_i g_ji c_i` (rows of `contribs`).
pub fn flip_statistics_quadratic(
    contribs: &DMatrix<f64>,
    vhat: &DMatrix<f64>,
    plan: &FlipPlan,
    vhat_tag: &str,
) -> Result<StatVector> {
    check_len(contribs.nrows(), plan)?;
    let d = contribs.ncols();
    if vhat.shape() != (d, d) {
        return Err(Error::InvalidInput(format!(
            "weight matrix is {:?}, expected {d}x{d}",
            vhat.shape()
        )));
    }
    check_psd(vhat)?;
    let scale = (contribs.nrows() as f64).sqrt().recip();
    let columns: Vec<&[f64]> = (0..d)
        .map(|c| {
            let start = c * contribs.nrows();
            &contribs.as_slice()[start..start + contribs.nrows()]
        })
        .collect();
    let values = per_row(plan.w(), |j| {
        let bits = plan.row_bits(j);
        let s: Vec<f64> = columns.iter().map(|c| signed_sum(bits, c) * scale).collect();
        let mut q = 0.0;
        for a in 0..d {
            let mut row = 0.0;
            for b in 0..d {
                row += vhat[(a, b)] * s[b];
            }
            q += s[a] * row;
        }
        q
    });
    Ok(StatVector {
        values,
        kind: StatKind::Quadratic,
        vhat_tag: Some(vhat_tag.to_string()),
    })
}
