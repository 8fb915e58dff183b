//! Vector autoregressions: equation-wise least squares, AIC lag selection,
//! residual autocorrelation tests and OLS-CUSUM stability processes.
//!
//! Data are passed as `K` equally long columns, oldest observation first.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dist;
use crate::error::{Error, Result};
use crate::linalg;

/// 5% critical value of `sup |B(t)|` for a standard Brownian bridge.
pub const CUSUM_BOUNDARY_5PCT: f64 = 1.358;

pub const DEFAULT_BG_LAGS: usize = 5;

/// Default Portmanteau horizon for a VAR(p): 16, or `p + 1` for very long lags.
pub fn default_portmanteau_lags(p: usize) -> usize {
    16.max(p + 1)
}

#[derive(Debug, Clone)]
pub struct VarModel {
    pub k: usize,
    pub p: usize,
    pub intercept: bool,
    /// Zero when the model has no intercept.
    pub intercepts: Vec<f64>,
    /// `a[l]` is `A_{l+1}`; entry `(i, j)` is the effect of variable `j`
    /// at lag `l + 1` in equation `i`.
    pub a: Vec<DMatrix<f64>>,
    /// `t_eff x K`.
    pub residuals: DMatrix<f64>,
    /// `U'U / t_eff`.
    pub sigma: DMatrix<f64>,
    /// Rows supplied, including presample rows.
    pub n_obs: usize,
    pub t_eff: usize,
    design: DMatrix<f64>,
    coef: DMatrix<f64>,
    xtx_inv: DMatrix<f64>,
}

impl VarModel {
    pub fn n_regressors(&self) -> usize {
        self.k * self.p + usize::from(self.intercept)
    }

    /// Column of the design holding variable `var` at lag `lag` (1-based).
    pub fn regressor_index(&self, lag: usize, var: usize) -> usize {
        assert!(lag >= 1 && lag <= self.p && var < self.k, "lag {lag} / variable {var} out of range");
        (lag - 1) * self.k + var
    }

    /// Regressor matrix: lags 1..p of every variable, then the intercept.
    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    /// `n_regressors x K`, one column per equation.
    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coef
    }

    pub fn xtx_inv(&self) -> &DMatrix<f64> {
        &self.xtx_inv
    }

    /// Degrees-of-freedom corrected residual variance of equation `i`.
    pub fn equation_variance(&self, i: usize) -> f64 {
        self.residuals.column(i).norm_squared() / (self.t_eff - self.n_regressors()) as f64
    }

    /// Classical covariance of equation `i`'s coefficients.
    pub fn equation_covariance(&self, i: usize) -> DMatrix<f64> {
        &self.xtx_inv * self.equation_variance(i)
    }

    pub fn aic(&self) -> Result<f64> {
        let params = (self.k * self.n_regressors()) as f64;
        Ok(linalg::ln_det_spd(&self.sigma)? + 2.0 * params / self.t_eff as f64)
    }

    pub fn summary(&self) -> VarSummary {
        let rows = |m: &DMatrix<f64>| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        VarSummary {
            k: self.k,
            p: self.p,
            intercept: self.intercept,
            t_eff: self.t_eff,
            intercepts: self.intercepts.clone(),
            a: self.a.iter().map(rows).collect(),
            sigma: rows(&self.sigma),
        }
    }
}

/// Plain-data view of a fitted model for JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarSummary {
    pub k: usize,
    pub p: usize,
    pub intercept: bool,
    pub t_eff: usize,
    pub intercepts: Vec<f64>,
    pub a: Vec<Vec<Vec<f64>>>,
    pub sigma: Vec<Vec<f64>>,
}

fn check_columns(data: &[Vec<f64>]) -> Result<usize> {
    let first = data.first().ok_or_else(|| Error::InvalidInput("VAR needs at least one variable".into()))?;
    if data.iter().any(|c| c.len() != first.len()) {
        return Err(Error::InvalidInput("VAR columns differ in length".into()));
    }
    Ok(first.len())
}

/// Fits a VAR(p) on every row that has `p` presample values.
pub fn fit_var(data: &[Vec<f64>], p: usize, intercept: bool) -> Result<VarModel> {
    fit_var_from(data, p, intercept, p)
}

/// Fits a VAR(p) using rows `start..` as the estimation sample (`start >= p`).
pub fn fit_var_from(data: &[Vec<f64>], p: usize, intercept: bool, start: usize) -> Result<VarModel> {
    let n_obs = check_columns(data)?;
    let k = data.len();
    if p == 0 {
        return Err(Error::InvalidInput("VAR lag order must be at least 1".into()));
    }
    if start < p {
        return Err(Error::InvalidInput(format!("estimation sample starts at row {start}, before {p} presample rows")));
    }
    let n_reg = k * p + usize::from(intercept);
    if n_obs <= start + n_reg {
        return Err(Error::TooShort { needed: start + n_reg + 1, got: n_obs });
    }
    let t_eff = n_obs - start;
    let design = DMatrix::from_fn(t_eff, n_reg, |r, c| {
        let t = start + r;
        if c == k * p {
            1.0
        } else {
            let (lag, var) = (c / k + 1, c % k);
            data[var][t - lag]
        }
    });
    let y = DMatrix::from_fn(t_eff, k, |r, i| data[i][start + r]);
    let ls = linalg::least_squares(&design, &y)?;

    let intercepts = (0..k).map(|i| if intercept { ls.coef[(k * p, i)] } else { 0.0 }).collect();
    let a = (0..p)
        .map(|l| DMatrix::from_fn(k, k, |i, j| ls.coef[(l * k + j, i)]))
        .collect();
    let sigma = ls.residuals.transpose() * &ls.residuals / t_eff as f64;
    Ok(VarModel {
        k,
        p,
        intercept,
        intercepts,
        a,
        sigma,
        n_obs,
        t_eff,
        residuals: ls.residuals,
        design,
        coef: ls.coef,
        xtx_inv: ls.xtx_inv,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AicRow {
    pub p: usize,
    pub aic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagSelection {
    pub selected: usize,
    /// Common estimation sample size shared by every candidate.
    pub t_eff: usize,
    pub table: Vec<AicRow>,
}

/// Chooses `p` in `1..=p_max` minimizing AIC, every candidate fitted on the
/// same sample (the first `p_max` rows serve only as presample).
pub fn select_lag_aic(data: &[Vec<f64>], p_max: usize, intercept: bool) -> Result<LagSelection> {
    if p_max == 0 {
        return Err(Error::InvalidInput("p_max must be at least 1".into()));
    }
    let mut table = Vec::with_capacity(p_max);
    let mut t_eff = 0;
    for p in 1..=p_max {
        let m = fit_var_from(data, p, intercept, p_max)?;
        t_eff = m.t_eff;
        table.push(AicRow { p, aic: m.aic()? });
    }
    let selected = table
        .iter()
        .min_by(|a, b| a.aic.total_cmp(&b.aic))
        .map(|r| r.p)
        .expect("non-empty table");
    Ok(LagSelection { selected, t_eff, table })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticResult {
    pub test_name: String,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub lags: usize,
}

/// Adjusted multivariate Ljung-Box statistic
/// `T² Σ_{j=1..h} tr(C_j' C_0⁻¹ C_j C_0⁻¹) / (T - j)` with `K²(h - p)` df.
pub fn portmanteau_test(m: &VarModel, h: usize) -> Result<DiagnosticResult> {
    if h <= m.p {
        return Err(Error::InvalidInput(format!("Portmanteau horizon {h} must exceed the lag order {}", m.p)));
    }
    let t = m.t_eff;
    if h >= t {
        return Err(Error::TooShort { needed: h + 1, got: t });
    }
    let u = &m.residuals;
    let c0 = u.transpose() * u / t as f64;
    let chol = c0
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("residual covariance is not positive definite".into()))?;
    let mut statistic = 0.0;
    for j in 1..=h {
        let lead = u.rows(j, t - j);
        let lagged = u.rows(0, t - j);
        let cj = lead.transpose() * lagged / t as f64;
        // tr(C_j' C0^-1 C_j C0^-1)
        let a = chol.solve(&cj);
        let b = chol.solve(&cj.transpose());
        statistic += (a.transpose() * b.transpose()).trace() / (t - j) as f64;
    }
    statistic *= (t * t) as f64;
    let df = m.k * m.k * (h - m.p);
    Ok(DiagnosticResult {
        test_name: "Portmanteau (adjusted)".into(),
        statistic,
        df,
        p_value: dist::chi_squared_sf(statistic, df as f64),
        lags: h,
    })
}

/// Breusch-Godfrey LM test: the residuals are regressed on the VAR's
/// regressors plus `h` lags of the residuals (zeros before the sample);
/// `LM = T (K - tr(Σ_u⁻¹ Σ_e))` with `h K²` df.
pub fn breusch_godfrey_test(m: &VarModel, h: usize) -> Result<DiagnosticResult> {
    if h == 0 {
        return Err(Error::InvalidInput("Breusch-Godfrey needs at least one lag".into()));
    }
    let (t, k) = (m.t_eff, m.k);
    let u = &m.residuals;
    let n_reg = m.n_regressors();
    let aux = DMatrix::from_fn(t, n_reg + h * k, |r, c| {
        if c < n_reg {
            m.design[(r, c)]
        } else {
            let (s, j) = ((c - n_reg) / k + 1, (c - n_reg) % k);
            if r >= s { u[(r - s, j)] } else { 0.0 }
        }
    });
    let ls = linalg::least_squares(&aux, u)?;
    let sigma_u = u.transpose() * u / t as f64;
    let sigma_e = ls.residuals.transpose() * &ls.residuals / t as f64;
    let ratio = linalg::solve_spd(&sigma_u, &sigma_e)?;
    let statistic = t as f64 * (k as f64 - ratio.trace());
    let df = h * k * k;
    Ok(DiagnosticResult {
        test_name: "Breusch-Godfrey".into(),
        statistic,
        df,
        p_value: dist::chi_squared_sf(statistic, df as f64),
        lags: h,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CusumProcess {
    pub equation: usize,
    pub sigma: f64,
    /// `(t, W(t))` for `t = 0, 1/T, ..., 1`.
    #[serde(skip)]
    pub points: Vec<(f64, f64)>,
    pub sup_abs: f64,
    pub boundary: f64,
    pub crossed: bool,
}

impl CusumProcess {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,W,boundary\n");
        for (t, w) in &self.points {
            writeln!(out, "{t},{w},{}", self.boundary).expect("write to string");
        }
        out
    }
}

/// OLS-CUSUM process of one residual vector with `n_coef` fitted coefficients.
pub fn cusum_process(residuals: &[f64], n_coef: usize) -> Result<CusumProcess> {
    let n = residuals.len();
    if n <= n_coef {
        return Err(Error::TooShort { needed: n_coef + 1, got: n });
    }
    let sigma = (residuals.iter().map(|e| e * e).sum::<f64>() / (n - n_coef) as f64).sqrt();
    if !(sigma > 0.0) {
        return Err(Error::Degenerate("residuals are identically zero".into()));
    }
    let scale = sigma * (n as f64).sqrt();
    let mut points = Vec::with_capacity(n + 1);
    points.push((0.0, 0.0));
    let mut acc = 0.0;
    for (i, e) in residuals.iter().enumerate() {
        acc += e;
        points.push(((i + 1) as f64 / n as f64, acc / scale));
    }
    let sup_abs = points.iter().fold(0.0f64, |m, (_, w)| m.max(w.abs()));
    Ok(CusumProcess {
        equation: 0,
        sigma,
        points,
        sup_abs,
        boundary: CUSUM_BOUNDARY_5PCT,
        crossed: sup_abs > CUSUM_BOUNDARY_5PCT,
    })
}

/// One OLS-CUSUM process per equation of `m`.
pub fn ols_cusum(m: &VarModel) -> Result<Vec<CusumProcess>> {
    (0..m.k)
        .map(|i| {
            let e: Vec<f64> = m.residuals.column(i).iter().copied().collect();
            let mut proc = cusum_process(&e, m.n_regressors())?;
            proc.equation = i;
            Ok(proc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub p: usize,
    pub portmanteau: DiagnosticResult,
    pub breusch_godfrey: DiagnosticResult,
    /// Neither test rejects at the gate level.
    pub clean: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticSettings {
    /// `None` uses [`default_portmanteau_lags`].
    pub portmanteau_lags: Option<usize>,
    pub bg_lags: usize,
    pub alpha: f64,
}

impl Default for DiagnosticSettings {
    fn default() -> Self {
        DiagnosticSettings { portmanteau_lags: None, bg_lags: DEFAULT_BG_LAGS, alpha: 0.05 }
    }
}

pub fn residual_diagnostics(m: &VarModel, settings: &DiagnosticSettings) -> Result<Diagnostics> {
    let h = settings.portmanteau_lags.map_or_else(|| default_portmanteau_lags(m.p), |h| h.max(m.p + 1));
    let portmanteau = portmanteau_test(m, h)?;
    let breusch_godfrey = breusch_godfrey_test(m, settings.bg_lags)?;
    let clean = portmanteau.p_value >= settings.alpha && breusch_godfrey.p_value >= settings.alpha;
    Ok(Diagnostics { p: m.p, portmanteau, breusch_godfrey, clean })
}

/// Raises the lag order from `p_start` one step at a time until both
/// autocorrelation tests are clean, refitting on all available rows.
/// Returns the accepted model and every diagnostic run on the way.
pub fn escalate_lags(
    data: &[Vec<f64>],
    p_start: usize,
    p_max: usize,
    intercept: bool,
    settings: &DiagnosticSettings,
) -> Result<(VarModel, Vec<Diagnostics>)> {
    let mut trail: Vec<Diagnostics> = Vec::new();
    let describe = |trail: &[Diagnostics]| {
        trail
            .iter()
            .map(|d| {
                format!(
                    "p={}: Portmanteau p-value {:.4}, Breusch-Godfrey p-value {:.4}",
                    d.p, d.portmanteau.p_value, d.breusch_godfrey.p_value
                )
            })
            .collect::<Vec<_>>()
    };
    for p in p_start..=p_max {
        let step = fit_var(data, p, intercept).and_then(|m| residual_diagnostics(&m, settings).map(|d| (m, d)));
        let (m, d) = match step {
            Ok(v) => v,
            Err(e) => {
                return Err(Error::Step { step: format!("lag escalation at p={p}"), trail: describe(&trail), source: Box::new(e) });
            }
        };
        let clean = d.clean;
        trail.push(d);
        if clean {
            return Ok((m, trail));
        }
    }
    Err(Error::Step {
        step: "lag escalation".into(),
        trail: describe(&trail),
        source: Box::new(Error::Failed(format!("residual autocorrelation persists up to p_max = {p_max}"))),
    })
}
