use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::glm::ScoreSet;
use crate::linalg::{condition_estimate, MAX_CONDITION};

/// Tested score contributions with their projection on the nuisance scores
/// removed: `nu_star = nu - nu_nuis * projector'`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveScores {
    /// `n x d`
    pub nu_star: DMatrix<f64>,
    /// `I12' I22^{-1}`, shape `d x (k - d)`.
    pub projector: DMatrix<f64>,
}

pub fn effective_contributions(scores: &ScoreSet) -> Result<EffectiveScores> {
    let info = &scores.info;
    let d = scores.tested_dim();
    if info.i22.nrows() == 0 {
        return Ok(EffectiveScores {
            nu_star: scores.nu.clone(),
            projector: DMatrix::zeros(d, 0),
        });
    }
    let cond = condition_estimate(&info.i22);
    if cond > MAX_CONDITION {
        return Err(Error::Singular(cond));
    }
    let projector = info.nuisance_regression()?.transpose();
    let nu_star = &scores.nu - &scores.nu_nuis * projector.transpose();
    Ok(EffectiveScores { nu_star, projector })
}
