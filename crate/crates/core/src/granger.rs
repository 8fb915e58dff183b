//! Toda-Yamamoto Granger causality for a pair of series.
//!
//! The pipeline: integration orders of both series (`m` is the larger),
//! AIC lag choice on the levels VAR, OLS-CUSUM stability, autocorrelation
//! diagnostics with lag escalation, a levels VAR(p + m), and Wald tests of
//! the first `p` lags of each variable in the other's equation.

use nalgebra::DVector;
use serde::Serialize;

use crate::dist;
use crate::error::{Error, Result};
use crate::index::Series;
use crate::linalg;
use crate::stationarity::{self, IntegrationOrder, OrderConfig};
use crate::timeseries;
use crate::var::{self, CusumProcess, Diagnostics, DiagnosticSettings, LagSelection, VarModel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaldResult {
    pub cause: String,
    pub effect: String,
    pub chi_sq: f64,
    pub df: usize,
    pub p_value: f64,
}

impl WaldResult {
    pub fn stars(&self) -> &'static str {
        crate::report::stars(self.p_value)
    }
}

/// Wald test that variable `cause` at lags `1..=p` has zero coefficients in
/// equation `effect`. Any further lags in the model are left unrestricted.
/// The covariance is the equation's classical OLS covariance.
pub fn wald_test(model: &VarModel, cause: usize, effect: usize, p: usize) -> Result<(f64, usize, f64)> {
    if p == 0 {
        return Err(Error::InvalidInput("Wald test needs at least one restricted lag".into()));
    }
    if p > model.p {
        return Err(Error::InvalidInput(format!("cannot restrict {p} lags of a VAR({})", model.p)));
    }
    if cause >= model.k || effect >= model.k {
        return Err(Error::InvalidInput(format!("variable index out of range for a {}-variable VAR", model.k)));
    }
    let idx: Vec<usize> = (1..=p).map(|l| model.regressor_index(l, cause)).collect();
    let coef = model.coefficients();
    let rb = DVector::from_iterator(p, idx.iter().map(|&r| coef[(r, effect)]));
    let cov = model.equation_covariance(effect);
    let rvr = nalgebra::DMatrix::from_fn(p, p, |a, b| cov[(idx[a], idx[b])]);
    let chi_sq = linalg::quadratic_form_inv(&rvr, &rb)
        .map_err(|_| Error::Singular("restricted coefficient covariance is singular".into()))?;
    Ok((chi_sq, p, dist::chi_squared_sf(chi_sq, p as f64)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrangerConfig {
    pub p_max: usize,
    pub alpha: f64,
    pub intercept: bool,
    pub order: OrderConfig,
    pub diagnostics: DiagnosticSettings,
    /// Skip the unit-root step and use this augmentation instead.
    pub fixed_m: Option<usize>,
}

impl Default for GrangerConfig {
    fn default() -> Self {
        GrangerConfig {
            p_max: 20,
            alpha: 0.05,
            intercept: true,
            order: OrderConfig::default(),
            diagnostics: DiagnosticSettings::default(),
            fixed_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityCheck {
    pub p: usize,
    pub equations: Vec<CusumProcess>,
    pub stable: bool,
}

impl StabilityCheck {
    fn of(m: &VarModel) -> Result<StabilityCheck> {
        let equations = var::ols_cusum(m)?;
        let stable = equations.iter().all(|c| !c.crossed);
        Ok(StabilityCheck { p: m.p, equations, stable })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrangerReport {
    pub names: [String; 2],
    pub first_period: String,
    pub last_period: String,
    pub n_obs: usize,
    /// `None` when the augmentation was fixed by configuration.
    pub orders: Option<[IntegrationOrder; 2]>,
    pub m: usize,
    pub aic: LagSelection,
    /// Stability of the AIC-selected model and, if escalation changed the
    /// lag, of the final VAR(p).
    pub stability: Vec<StabilityCheck>,
    pub stable: bool,
    pub escalation: Vec<Diagnostics>,
    pub p: usize,
    pub augmented_order: usize,
    pub augmented_model: var::VarSummary,
    pub wald: [WaldResult; 2],
}

impl GrangerReport {
    /// Final VAR(p) diagnostics (the clean step of the escalation).
    pub fn diagnostics(&self) -> &Diagnostics {
        self.escalation.last().expect("escalation always records a step")
    }
}

fn step<T>(name: &str, trail: &[String], r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Step { step, trail: inner, source } => {
            let mut all = trail.to_vec();
            all.extend(inner);
            Error::Step { step: format!("{name}: {step}"), trail: all, source }
        }
        other => Error::Step { step: name.to_owned(), trail: trail.to_vec(), source: Box::new(other) },
    })
}

/// Runs the full procedure on `x` and `y`. `wald[0]` is `x -> y`, `wald[1]`
/// is `y -> x`; both come from the same VAR(p + m).
pub fn toda_yamamoto(x: &Series, y: &Series, names: [&str; 2], cfg: &GrangerConfig) -> Result<GrangerReport> {
    let mut trail = Vec::new();

    let aligned = step("alignment", &trail, timeseries::align(&[x, y]))?;
    step("alignment", &trail, aligned.ensure_contiguous())?;
    let data = aligned.columns.clone();
    trail.push(format!("{} aligned observations", aligned.n_rows()));

    let (orders, m) = match cfg.fixed_m {
        Some(m) => (None, m),
        None => {
            let ox = step(&format!("integration order of {}", names[0]), &trail, {
                let s = Series::from_values(aligned.periods[0], &data[0]);
                s.and_then(|s| stationarity::integration_order(&s, &cfg.order))
            })?;
            let oy = step(&format!("integration order of {}", names[1]), &trail, {
                let s = Series::from_values(aligned.periods[0], &data[1]);
                s.and_then(|s| stationarity::integration_order(&s, &cfg.order))
            })?;
            let m = ox.order.max(oy.order);
            trail.push(format!("{} is I({}), {} is I({}), m = {m}", names[0], ox.order, names[1], oy.order));
            (Some([ox, oy]), m)
        }
    };

    let aic = step("AIC lag selection", &trail, var::select_lag_aic(&data, cfg.p_max, cfg.intercept))?;
    trail.push(format!("AIC selects p = {}", aic.selected));

    let mut stability = Vec::new();
    let first = step("stability", &trail, var::fit_var(&data, aic.selected, cfg.intercept).and_then(|m| StabilityCheck::of(&m)))?;
    trail.push(format!("OLS-CUSUM at p = {}: {}", first.p, if first.stable { "stable" } else { "boundary crossed" }));
    stability.push(first);

    let mut diag = cfg.diagnostics.clone();
    diag.alpha = cfg.alpha;
    let (model_p, escalation) = step(
        "autocorrelation diagnostics",
        &trail,
        var::escalate_lags(&data, aic.selected, cfg.p_max, cfg.intercept, &diag),
    )?;
    let p = model_p.p;
    trail.push(format!("residual diagnostics clean at p = {p}"));
    if p != aic.selected {
        stability.push(step("stability", &trail, StabilityCheck::of(&model_p))?);
    }
    let stable = stability.iter().all(|s| s.stable);

    let augmented = step(&format!("VAR({}) fit", p + m), &trail, var::fit_var(&data, p + m, cfg.intercept))?;
    let wald_for = |cause: usize, effect: usize| -> Result<WaldResult> {
        let (chi_sq, df, p_value) = wald_test(&augmented, cause, effect, p)?;
        Ok(WaldResult { cause: names[cause].to_owned(), effect: names[effect].to_owned(), chi_sq, df, p_value })
    };
    let forward = step("Wald test", &trail, wald_for(0, 1))?;
    let backward = step("Wald test", &trail, wald_for(1, 0))?;

    Ok(GrangerReport {
        names: [names[0].to_owned(), names[1].to_owned()],
        first_period: aligned.periods[0].to_string(),
        last_period: aligned.periods[aligned.n_rows() - 1].to_string(),
        n_obs: aligned.n_rows(),
        orders,
        m,
        aic,
        stability,
        stable,
        escalation,
        p,
        augmented_order: p + m,
        augmented_model: augmented.summary(),
        wald: [forward, backward],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn driven_pair(n: usize, seed: u64, coupling: f64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        for t in 1..n {
            let (e1, e2): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            x[t] = 0.5 * x[t - 1] + e1;
            y[t] = 0.3 * y[t - 1] + coupling * x[t - 1] + e2;
        }
        vec![x, y]
    }

    #[test]
    fn wald_equals_restricted_rss_identity() {
        let data = driven_pair(300, 1, 0.4);
        let m = var::fit_var(&data, 3, true).unwrap();
        let (w, df, _) = wald_test(&m, 0, 1, 2).unwrap();
        assert_eq!(df, 2);
        // restricted fit: drop x at lags 1 and 2 from the y equation
        let keep: Vec<usize> = (0..m.n_regressors()).filter(|&c| c != m.regressor_index(1, 0) && c != m.regressor_index(2, 0)).collect();
        let z = m.design().select_columns(&keep);
        let yv = nalgebra::DMatrix::from_fn(m.t_eff, 1, |r, _| data[1][3 + r]);
        let rss_r = linalg::least_squares(&z, &yv).unwrap().rss(0);
        let rss_u = m.residuals.column(1).norm_squared();
        let expect = (rss_r - rss_u) / (rss_u / (m.t_eff - m.n_regressors()) as f64);
        assert!((w - expect).abs() <= 1e-8 * expect, "{w} vs {expect}");
    }

    #[test]
    fn wald_rejects_empty_restriction() {
        let data = driven_pair(100, 2, 0.4);
        let m = var::fit_var(&data, 2, true).unwrap();
        assert!(wald_test(&m, 0, 1, 0).is_err());
        assert!(wald_test(&m, 0, 1, 3).is_err());
    }

    #[test]
    fn pipeline_detects_one_way_causality() {
        let data = driven_pair(600, 3, 0.5);
        let start = "1990-01".parse().unwrap();
        let x = Series::from_values(start, &data[0]).unwrap();
        let y = Series::from_values(start, &data[1]).unwrap();
        let cfg = GrangerConfig { p_max: 8, ..Default::default() };
        let r = toda_yamamoto(&x, &y, ["X", "Y"], &cfg).unwrap();
        assert_eq!(r.m, 0);
        assert_eq!(r.wald[0].df, r.p);
        assert_eq!(r.wald[1].df, r.p);
        assert!(r.wald[0].p_value < 0.01);
        assert_eq!(r.aic.table.len(), 8);
    }

    #[test]
    fn failures_carry_the_trail() {
        let start = "1990-01".parse().unwrap();
        let x = Series::from_values(start, &[1.0; 30]).unwrap();
        let y = Series::from_values(start, &(0..30).map(f64::from).collect::<Vec<_>>()).unwrap();
        let err = toda_yamamoto(&x, &y, ["X", "Y"], &GrangerConfig::default()).unwrap_err();
        match err {
            Error::Step { step, trail, .. } => {
                assert!(step.contains("integration order of X"), "{step}");
                assert_eq!(trail, vec!["30 aligned observations".to_owned()]);
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
