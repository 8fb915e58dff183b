//! Ordinary least squares with the usual summary block, and the
//! forecast-augmentation comparison (does a lagged extra regressor add
//! explanatory power over a consensus forecast?).

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dist;
use crate::error::{Error, Result};
use crate::index::Series;
use crate::linalg;
use crate::period::Period;
use crate::timeseries;

pub const INTERCEPT: &str = "Constant";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FTest {
    pub statistic: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsResult {
    /// Intercept first, then regressors in the order given.
    pub coefficients: Vec<Coefficient>,
    pub n: usize,
    pub df_resid: usize,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub residual_std_error: f64,
    /// Joint test that every non-intercept coefficient is zero; absent for
    /// an intercept-only model.
    pub f_test: Option<FTest>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl OlsResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Fits `y` on an intercept plus the named regressors with classical
/// (homoskedastic) standard errors.
pub fn ols_fit(y: &[f64], regressors: &[(&str, &[f64])]) -> Result<OlsResult> {
    let n = y.len();
    let k = regressors.len() + 1;
    if let Some((name, _)) = regressors.iter().find(|(_, x)| x.len() != n) {
        return Err(Error::InvalidInput(format!("regressor '{name}' length differs from the response")));
    }
    if n <= k {
        return Err(Error::TooShort { needed: k + 1, got: n });
    }
    let x = DMatrix::from_fn(n, k, |i, j| if j == 0 { 1.0 } else { regressors[j - 1].1[i] });
    let ymat = DMatrix::from_column_slice(n, 1, y);
    let ls = linalg::least_squares(&x, &ymat)?;

    let df_resid = n - k;
    let rss = ls.rss(0);
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if tss == 0.0 {
        return Err(Error::Degenerate("response is constant".into()));
    }
    let r_squared = (1.0 - rss / tss).clamp(0.0, 1.0);
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / df_resid as f64;
    let sigma2 = rss / df_resid as f64;

    let names = std::iter::once(INTERCEPT).chain(regressors.iter().map(|(n, _)| *n));
    let coefficients = names
        .enumerate()
        .map(|(j, name)| {
            let estimate = ls.coef[(j, 0)];
            let std_error = (sigma2 * ls.xtx_inv[(j, j)]).sqrt();
            let t_stat = estimate / std_error;
            Coefficient {
                name: name.to_owned(),
                estimate,
                std_error,
                t_stat,
                p_value: dist::t_two_sided(t_stat, df_resid as f64),
            }
        })
        .collect();

    let f_test = (k > 1).then(|| {
        let df_num = k - 1;
        let statistic = (r_squared / df_num as f64) / ((1.0 - r_squared) / df_resid as f64);
        FTest { statistic, df_num, df_den: df_resid, p_value: dist::f_sf(statistic, df_num as f64, df_resid as f64) }
    });

    Ok(OlsResult {
        coefficients,
        n,
        df_resid,
        r_squared,
        adj_r_squared,
        residual_std_error: sigma2.sqrt(),
        f_test,
        residuals: ls.residuals.column(0).iter().copied().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AugmentationStudy {
    pub periods: Vec<Period>,
    pub restricted: OlsResult,
    pub augmented: OlsResult,
    /// `(adjR2_augmented - adjR2_restricted) / adjR2_restricted`.
    pub adj_r_squared_gain_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentationNames {
    pub forecast: String,
    pub extra: String,
}

impl Default for AugmentationNames {
    fn default() -> Self {
        AugmentationNames { forecast: "SPF".into(), extra: "RSS".into() }
    }
}

/// Fits `actual ~ forecast` and `actual ~ forecast + extra(t - lag_extra)`
/// on the same rows: the periods where the actual, the (optionally lagged)
/// forecast and the lagged extra series are all observed.
pub fn augmentation_study(
    actual: &Series,
    forecast: &Series,
    extra: &Series,
    lag_extra: usize,
    lag_forecast: usize,
    names: &AugmentationNames,
) -> Result<AugmentationStudy> {
    let forecast = if lag_forecast > 0 { timeseries::lag(forecast, lag_forecast)? } else { forecast.clone() };
    let extra = if lag_extra > 0 { timeseries::lag(extra, lag_extra)? } else { extra.clone() };
    let aligned = timeseries::align(&[actual, &forecast, &extra])?;
    let (y, f, e) = (&aligned.columns[0], &aligned.columns[1], &aligned.columns[2]);

    let restricted = ols_fit(y, &[(names.forecast.as_str(), f)])?;
    let augmented = ols_fit(y, &[(names.forecast.as_str(), f), (names.extra.as_str(), e)])?;
    let adj_r_squared_gain_ratio = (augmented.adj_r_squared - restricted.adj_r_squared) / restricted.adj_r_squared;
    Ok(AugmentationStudy { periods: aligned.periods, restricted, augmented, adj_r_squared_gain_ratio })
}
