//! Per-observation score contributions and partitioned Fisher information.

use nalgebra::DMatrix;

use super::design::DesignMatrix;
use super::family::Family;
use super::fit::NullFit;
use crate::error::{Error, Result};
use crate::linalg::{condition_estimate, solve_spd, MAX_CONDITION};

/// Blocks of `I = X'WX / n` in (tested, nuisance) orientation:
/// `I = [[i11, i12'], [i12, i22]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoBlocks {
    /// `d x d`
    pub i11: DMatrix<f64>,
    /// `(k - d) x d`
    pub i12: DMatrix<f64>,
    /// `(k - d) x (k - d)`
    pub i22: DMatrix<f64>,
}

impl InfoBlocks {
    pub fn tested_dim(&self) -> usize {
        self.i11.nrows()
    }

    /// `I22^{-1} I12`, shape `(k - d) x d`, via a Cholesky solve.
    pub fn nuisance_regression(&self) -> Result<DMatrix<f64>> {
        solve_spd(&self.i22, &self.i12)
    }

    /// Effective information `I11 - I12' I22^{-1} I12`.
    pub fn effective(&self) -> Result<DMatrix<f64>> {
        if self.i22.nrows() == 0 {
            return Ok(self.i11.clone());
        }
        let reg = self.nuisance_regression()?;
        let eff = &self.i11 - self.i12.transpose() * reg;
        Ok((&eff + eff.transpose()) * 0.5)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            i11: &self.i11 * c,
            i12: &self.i12 * c,
            i22: &self.i22 * c,
        }
    }
}

/// Score contributions at the null fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    /// `n x d` tested contributions.
    pub nu: DMatrix<f64>,
    /// `n x (k - d)` nuisance contributions.
    pub nu_nuis: DMatrix<f64>,
    pub info: InfoBlocks,
}

impl ScoreSet {
    pub fn nobs(&self) -> usize {
        self.nu.nrows()
    }

    pub fn tested_dim(&self) -> usize {
        self.nu.ncols()
    }

    /// Misspecified copy: scores multiplied by `score_factor`, weights (and so
    /// the information) by `weight_factor`.
    pub fn scaled(&self, score_factor: f64, weight_factor: f64) -> Self {
        Self {
            nu: &self.nu * score_factor,
            nu_nuis: &self.nu_nuis * score_factor,
            info: self.info.scaled(weight_factor),
        }
    }

    /// Observed score `n^{-1/2} * sum_i nu_i` for the tested block.
    pub fn observed_score(&self) -> Vec<f64> {
        let scale = (self.nobs() as f64).sqrt().recip();
        self.nu.column_iter().map(|c| c.sum() * scale).collect()
    }
}

pub fn information_blocks(fit: &NullFit, design: &DesignMatrix) -> Result<InfoBlocks> {
    let n = design.nrows() as f64;
    let xt = design.tested_block();
    let xn = design.nuisance_block();
    let block = |a: &DMatrix<f64>, b: &DMatrix<f64>| -> DMatrix<f64> {
        DMatrix::from_fn(a.ncols(), b.ncols(), |r, c| {
            a.column(r)
                .iter()
                .zip(b.column(c).iter())
                .zip(&fit.weights)
                .map(|((u, v), w)| u * w * v)
                .sum::<f64>()
                / n
        })
    };
    let info = InfoBlocks {
        i11: block(&xt, &xt),
        i12: block(&xn, &xt),
        i22: block(&xn, &xn),
    };
    if info.i22.nrows() > 0 {
        let cond = condition_estimate(&info.i22);
        if cond > MAX_CONDITION {
            return Err(Error::Singular(cond));
        }
    }
    Ok(info)
}

/// `nu_i = x_i (y_i - mu_i) / a_i`, split into tested and nuisance blocks.
pub fn score_contributions(
    fit: &NullFit,
    design: &DesignMatrix,
    family: Family,
) -> Result<ScoreSet> {
    if !fit.converged {
        return Err(Error::NotConverged(fit.iterations));
    }
    let resid: Vec<f64> = design
        .response()
        .iter()
        .zip(&fit.mu_hat)
        .map(|(y, m)| (y - m) / family.dispersion())
        .collect();
    let contributions = |cols: &[usize]| {
        DMatrix::from_fn(design.nrows(), cols.len(), |i, c| {
            design.x()[(i, cols[c])] * resid[i]
        })
    };
    Ok(ScoreSet {
        nu: contributions(design.tested()),
        nu_nuis: contributions(design.nuisance()),
        info: information_blocks(fit, design)?,
    })
}
