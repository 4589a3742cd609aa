//! Small dense linear-algebra helpers shared by the fitting and testing code.
//!
//! Systems with symmetric positive (semi-)definite matrices are solved through
//! a Cholesky factorization; when that fails a full-pivoting LU is tried.
//! Nothing here forms an explicit inverse except [`spd_inverse`], which is
//! only used to report covariance matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Condition-number ceiling above which a symmetric matrix counts as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Ratio of largest to smallest eigenvalue magnitude of a symmetric matrix.
///
/// Returns infinity when the smallest eigenvalue is not positive.
pub fn condition_estimate(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    let eig = a.clone().symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solve `a * x = b` for symmetric positive definite `a`.
pub fn solve_spd(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() == 0 {
        return Ok(DMatrix::zeros(0, b.ncols()));
    }
    if let Some(chol) = a.clone().cholesky() {
        return Ok(chol.solve(b));
    }
    let lu = a.clone().full_piv_lu();
    lu.solve(b)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Singular(condition_estimate(a)))
}

pub fn solve_spd_vec(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let bm = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    Ok(solve_spd(a, &bm)?.column(0).into_owned())
}

/// Like [`solve_spd`] but first rejects matrices whose condition estimate
/// exceeds [`MAX_CONDITION`].
pub fn solve_well_conditioned(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let cond = condition_estimate(a);
    if cond > MAX_CONDITION {
        return Err(Error::Singular(cond));
    }
    solve_spd(a, b)
}

pub fn spd_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = solve_spd(a, &DMatrix::identity(a.nrows(), a.ncols()))?;
    Ok((&inv + inv.transpose()) * 0.5)
}

/// Checks symmetry and non-negativity of the spectrum up to a relative tolerance.
pub fn check_psd(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotPsd);
    }
    let scale = a.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if (a - a.transpose()).amax() > 1e-10 * scale {
        return Err(Error::NotPsd);
    }
    if a.nrows() == 0 {
        return Ok(());
    }
    let min = a
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min < -1e-10 * scale {
        Err(Error::NotPsd)
    } else {
        Ok(())
    }
}

/// True when the columns of `x` are linearly independent (relative SVD tolerance).
pub fn full_column_rank(x: &DMatrix<f64>) -> bool {
    if x.ncols() == 0 {
        return true;
    }
    if x.nrows() < x.ncols() {
        return false;
    }
    let sv = x.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    max > 0.0 && min > 1e-10 * max
}

/// `X' diag(w) X` without materializing the diagonal.
pub fn weighted_cross(x: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let k = x.ncols();
    let mut out = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let mut s = 0.0;
            for (i, wi) in w.iter().enumerate() {
                s += x[(i, a)] * wi * x[(i, b)];
            }
            out[(a, b)] = s;
            out[(b, a)] = s;
        }
    }
    out
}
