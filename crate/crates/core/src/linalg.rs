//! Least-squares kernel shared by the regression, unit-root and VAR code.
//!
//! Everything goes through a Householder QR of the column-equilibrated
//! design; nothing inverts `X'X` directly. The condition number of the
//! equilibrated design is checked against [`MAX_CONDITION`].

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const MAX_CONDITION: f64 = 1e12;

/// Least-squares fit of one or more response columns on a common design.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// `k x m` coefficients, one column per response.
    pub coef: DMatrix<f64>,
    /// `n x m` residuals.
    pub residuals: DMatrix<f64>,
    /// `(X'X)^{-1}`, built from triangular solves on R.
    pub xtx_inv: DMatrix<f64>,
    pub condition: f64,
}

impl LeastSquares {
    pub fn n_obs(&self) -> usize {
        self.residuals.nrows()
    }

    pub fn n_coef(&self) -> usize {
        self.coef.nrows()
    }

    pub fn df_resid(&self) -> usize {
        self.n_obs() - self.n_coef()
    }

    /// Residual sum of squares for response `j`.
    pub fn rss(&self, j: usize) -> f64 {
        self.residuals.column(j).norm_squared()
    }
}

pub fn least_squares(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<LeastSquares> {
    let (n, k) = x.shape();
    if y.nrows() != n {
        return Err(Error::InvalidInput(format!("design has {n} rows but response has {}", y.nrows())));
    }
    if k == 0 {
        return Err(Error::InvalidInput("design matrix has no columns".into()));
    }
    if n <= k {
        return Err(Error::TooShort { needed: k + 1, got: n });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value in regression data".into()));
    }

    let scales: Vec<f64> = (0..k).map(|j| x.column(j).norm()).collect();
    if let Some(j) = scales.iter().position(|&s| s == 0.0) {
        return Err(Error::Singular(format!("design column {j} is identically zero")));
    }
    let mut xs = x.clone();
    for (j, s) in scales.iter().enumerate() {
        xs.column_mut(j).unscale_mut(*s);
    }

    let qr = xs.qr();
    let r = qr.r();
    let sv = r.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if smin <= 0.0 || !smin.is_finite() {
        return Err(Error::Singular("design matrix is rank deficient".into()));
    }
    let condition = smax / smin;
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned(condition));
    }

    let qty = qr.q().transpose() * y;
    let mut coef = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    let mut xtx_inv = &r_inv * r_inv.transpose();
    for i in 0..k {
        coef.row_mut(i).unscale_mut(scales[i]);
        for j in 0..k {
            xtx_inv[(i, j)] /= scales[i] * scales[j];
        }
    }
    let residuals = y - x * &coef;
    Ok(LeastSquares { coef, residuals, xtx_inv, condition })
}

/// Solves `a x = b` for symmetric positive-definite `a`.
pub fn solve_spd(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("matrix is not positive definite".into()))?;
    Ok(chol.solve(b))
}

/// `x' a^{-1} x` for symmetric positive-definite `a`.
pub fn quadratic_form_inv(a: &DMatrix<f64>, x: &DVector<f64>) -> Result<f64> {
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("matrix is not positive definite".into()))?;
    Ok(x.dot(&chol.solve(x)))
}

/// Natural log of the determinant of a symmetric positive-definite matrix.
pub fn ln_det_spd(a: &DMatrix<f64>) -> Result<f64> {
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("matrix is not positive definite".into()))?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// Builds a column-major matrix from row slices.
pub fn from_rows(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, k, |i, j| rows[i][j])
}
