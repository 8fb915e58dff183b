//! Augmented Dickey-Fuller and KPSS tests, and the integration-order rule
//! that combines them.
//!
//! P-values are interpolated linearly in the statistic between tabulated
//! critical values (see `data/*.csv` for the tables and their sources).
//! Outside the tabulated range the p-value is reported as a bound, e.g.
//! `< 0.01` or `> 0.1`.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::Series;
use crate::linalg;
use crate::timeseries::diff_values;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    /// Intercept only (KPSS: level stationarity).
    Constant,
    /// Intercept and linear trend.
    ConstantTrend,
}

impl fmt::Display for Deterministic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Deterministic::Constant => "constant",
            Deterministic::ConstantTrend => "constant+trend",
        })
    }
}

impl FromStr for Deterministic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "constant" | "c" | "level" | "drift" => Ok(Deterministic::Constant),
            "constant+trend" | "ct" | "trend" => Ok(Deterministic::ConstantTrend),
            _ => Err(Error::InvalidInput(format!("unknown deterministic terms '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PBound {
    /// True p-value is smaller than the reported one.
    Below,
    /// True p-value is larger than the reported one.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootResult {
    pub test: String,
    pub statistic: f64,
    pub p_value: f64,
    pub p_is_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_bound: Option<PBound>,
    pub lags: usize,
    pub det_terms: Deterministic,
    pub n: usize,
}

impl UnitRootResult {
    /// P-value in table style: `0.195`, `< 0.01`, `> 0.1`.
    pub fn p_display(&self) -> String {
        match self.p_bound {
            Some(PBound::Below) => format!("< {}", self.p_value),
            Some(PBound::Above) => format!("> {}", self.p_value),
            None => format!("{:.3}", self.p_value),
        }
    }

    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

struct CriticalTable {
    probs: Vec<f64>,
    /// (sample size, critical values aligned with `probs`)
    rows: Vec<(f64, Vec<f64>)>,
}

fn parse_table(text: &str, det: &str, sized: bool) -> CriticalTable {
    let header = text
        .lines()
        .find_map(|l| l.strip_prefix("# det,"))
        .expect("table header");
    let probs: Vec<f64> = header
        .split(',')
        .filter_map(|h| h.strip_prefix('p'))
        .map(|p| p.parse().expect("probability"))
        .collect();
    let rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .filter_map(|l| {
            let mut fields = l.split(',');
            (fields.next()? == det).then(|| {
                let n = if sized { fields.next().expect("n").parse().expect("n") } else { f64::INFINITY };
                (n, fields.map(|v| v.parse().expect("critical value")).collect())
            })
        })
        .collect();
    CriticalTable { probs, rows }
}

const ADF_TABLE: &str = include_str!("../data/adf_critical_values.csv");
const KPSS_TABLE: &str = include_str!("../data/kpss_critical_values.csv");

static ADF_CONSTANT: LazyLock<CriticalTable> = LazyLock::new(|| parse_table(ADF_TABLE, "constant", true));
static ADF_TREND: LazyLock<CriticalTable> = LazyLock::new(|| parse_table(ADF_TABLE, "trend", true));
static KPSS_LEVEL: LazyLock<CriticalTable> = LazyLock::new(|| parse_table(KPSS_TABLE, "level", false));
static KPSS_TREND: LazyLock<CriticalTable> = LazyLock::new(|| parse_table(KPSS_TABLE, "trend", false));

fn interp(x: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    if x1 == x0 {
        y0
    } else {
        y0 + (x - x0) / (x1 - x0) * (y1 - y0)
    }
}

impl CriticalTable {
    /// Critical values for sample size `n`, linear in `n` between rows and
    /// clamped to the first and last rows.
    fn critical_values(&self, n: f64) -> Vec<f64> {
        let rows = &self.rows;
        if rows.len() == 1 || n <= rows[0].0 {
            return rows[0].1.clone();
        }
        if n >= rows[rows.len() - 1].0 {
            return rows[rows.len() - 1].1.clone();
        }
        let i = rows.iter().position(|r| r.0 >= n).expect("bracketing row");
        let (lo, hi) = (&rows[i - 1], &rows[i]);
        lo.1.iter().zip(&hi.1).map(|(a, b)| interp(n, lo.0, hi.0, *a, *b)).collect()
    }

    /// Interpolated p-value for `stat`. Critical values must be sorted by
    /// increasing statistic.
    fn p_value(&self, stat: f64, n: f64) -> (f64, Option<PBound>) {
        let mut pairs: Vec<(f64, f64)> = self.critical_values(n).into_iter().zip(self.probs.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (first, last) = (pairs[0], pairs[pairs.len() - 1]);
        // p increases with the statistic for left-tail tables, decreases for right-tail ones
        let increasing = last.1 > first.1;
        if stat < first.0 {
            return (first.1, Some(if increasing { PBound::Below } else { PBound::Above }));
        }
        if stat > last.0 {
            return (last.1, Some(if increasing { PBound::Above } else { PBound::Below }));
        }
        let i = pairs.iter().position(|p| p.0 >= stat).expect("bracketing value");
        if i == 0 {
            return (first.1, None);
        }
        let (lo, hi) = (pairs[i - 1], pairs[i]);
        (interp(stat, lo.0, hi.0, lo.1, hi.1), None)
    }
}

/// Large-sample 5% critical value of the ADF statistic, as embedded.
pub fn adf_critical_value(det: Deterministic, n: usize, prob: f64) -> Option<f64> {
    let table = match det {
        Deterministic::Constant => &*ADF_CONSTANT,
        Deterministic::ConstantTrend => &*ADF_TREND,
    };
    let i = table.probs.iter().position(|p| (p - prob).abs() < 1e-12)?;
    Some(table.critical_values(n as f64)[i])
}

pub fn kpss_critical_value(det: Deterministic, prob: f64) -> Option<f64> {
    let table = match det {
        Deterministic::Constant => &*KPSS_LEVEL,
        Deterministic::ConstantTrend => &*KPSS_TREND,
    };
    let i = table.probs.iter().position(|p| (p - prob).abs() < 1e-12)?;
    Some(table.critical_values(f64::INFINITY)[i])
}

fn relative_spread_is_zero(xs: &[f64]) -> bool {
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
    sd == 0.0 || sd <= scale * 1e-10
}

/// ADF regression of `Δy_t` on the deterministic terms, `y_{t-1}` and
/// `lags` lagged differences; the statistic is the t-ratio on `y_{t-1}`.
/// Null hypothesis: unit root.
pub fn adf_test(s: &Series, lags: usize, det: Deterministic) -> Result<UnitRootResult> {
    adf_values(&s.contiguous_values()?, lags, det)
}

pub fn adf_values(y: &[f64], lags: usize, det: Deterministic) -> Result<UnitRootResult> {
    let n = y.len();
    if n < lags + 10 {
        return Err(Error::TooShort { needed: lags + 10, got: n });
    }
    let dy = diff_values(y);
    if relative_spread_is_zero(&dy) && dy.iter().all(|d| *d == dy[0]) {
        return Err(Error::Degenerate("differenced series is constant".into()));
    }

    let rows = n - 1 - lags;
    let n_det = match det {
        Deterministic::Constant => 1,
        Deterministic::ConstantTrend => 2,
    };
    let k = n_det + 1 + lags;
    let level_col = n_det;
    // row r corresponds to t = lags + 1 + r; dy[t - 1] = y[t] - y[t - 1]
    let x = DMatrix::from_fn(rows, k, |r, j| {
        let t = lags + 1 + r;
        match j {
            0 => 1.0,
            1 if n_det == 2 => t as f64,
            j if j == level_col => y[t - 1],
            j => dy[t - 1 - (j - level_col)],
        }
    });
    let resp = DMatrix::from_fn(rows, 1, |r, _| dy[lags + r]);
    let ls = linalg::least_squares(&x, &resp)?;
    let sigma2 = ls.rss(0) / ls.df_resid() as f64;
    if sigma2 <= 0.0 {
        return Err(Error::Degenerate("ADF regression fits exactly".into()));
    }
    let se = (sigma2 * ls.xtx_inv[(level_col, level_col)]).sqrt();
    let statistic = ls.coef[(level_col, 0)] / se;

    let table = match det {
        Deterministic::Constant => &*ADF_CONSTANT,
        Deterministic::ConstantTrend => &*ADF_TREND,
    };
    // sample size convention: number of first differences
    let (p_value, p_bound) = table.p_value(statistic, dy.len() as f64);
    Ok(UnitRootResult {
        test: "adf".into(),
        statistic,
        p_value,
        p_is_bound: p_bound.is_some(),
        p_bound,
        lags,
        det_terms: det,
        n: dy.len(),
    })
}

/// Residuals of `y` on the KPSS deterministic terms.
fn kpss_residuals(y: &[f64], det: Deterministic) -> Vec<f64> {
    let n = y.len() as f64;
    match det {
        Deterministic::Constant => {
            let mean = y.iter().sum::<f64>() / n;
            y.iter().map(|v| v - mean).collect()
        }
        Deterministic::ConstantTrend => {
            let tbar = (n + 1.0) / 2.0;
            let ybar = y.iter().sum::<f64>() / n;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (i, v) in y.iter().enumerate() {
                let dt = (i + 1) as f64 - tbar;
                sxy += dt * (v - ybar);
                sxx += dt * dt;
            }
            let b = sxy / sxx;
            y.iter().enumerate().map(|(i, v)| v - ybar - b * ((i + 1) as f64 - tbar)).collect()
        }
    }
}

/// Bartlett-window long-run variance with truncation lag `l`.
pub fn long_run_variance(e: &[f64], l: usize) -> f64 {
    let n = e.len() as f64;
    let mut s2 = e.iter().map(|v| v * v).sum::<f64>() / n;
    for s in 1..=l.min(e.len().saturating_sub(1)) {
        let w = 1.0 - s as f64 / (l as f64 + 1.0);
        let gamma: f64 = e[s..].iter().zip(e).map(|(a, b)| a * b).sum::<f64>() / n;
        s2 += 2.0 * w * gamma;
    }
    s2
}

/// KPSS statistic `n^-2 Σ S_t² / s²(l)`. Null hypothesis: stationarity
/// around the deterministic terms.
pub fn kpss_test(s: &Series, trunc_lag: usize, det: Deterministic) -> Result<UnitRootResult> {
    kpss_values(&s.contiguous_values()?, trunc_lag, det)
}

pub fn kpss_values(y: &[f64], trunc_lag: usize, det: Deterministic) -> Result<UnitRootResult> {
    let n = y.len();
    if n < 20 {
        return Err(Error::TooShort { needed: 20, got: n });
    }
    if relative_spread_is_zero(y) {
        return Err(Error::Degenerate("series has (numerically) zero variance".into()));
    }
    let e = kpss_residuals(y, det);
    let mut acc = 0.0;
    let numerator: f64 = e
        .iter()
        .map(|v| {
            acc += v;
            acc * acc
        })
        .sum::<f64>()
        / (n as f64 * n as f64);
    let lrv = long_run_variance(&e, trunc_lag);
    if !(lrv > 0.0) {
        return Err(Error::Degenerate("long-run variance estimate is not positive".into()));
    }
    let statistic = numerator / lrv;
    let table = match det {
        Deterministic::Constant => &*KPSS_LEVEL,
        Deterministic::ConstantTrend => &*KPSS_TREND,
    };
    let (p_value, p_bound) = table.p_value(statistic, f64::INFINITY);
    Ok(UnitRootResult {
        test: "kpss".into(),
        statistic,
        p_value,
        p_is_bound: p_bound.is_some(),
        p_bound,
        lags: trunc_lag,
        det_terms: det,
        n,
    })
}

/// Settings for [`integration_order`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderConfig {
    pub max_order: usize,
    pub alpha: f64,
    pub adf_lags: usize,
    pub adf_det: Deterministic,
    pub kpss_lag: usize,
    pub kpss_det: Deterministic,
}

impl Default for OrderConfig {
    fn default() -> Self {
        OrderConfig {
            max_order: 2,
            alpha: 0.05,
            adf_lags: 6,
            adf_det: Deterministic::Constant,
            kpss_lag: 3,
            kpss_det: Deterministic::Constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderStep {
    pub difference: usize,
    pub adf: UnitRootResult,
    pub kpss: UnitRootResult,
    /// ADF rejects a unit root and KPSS does not reject stationarity.
    pub stationary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrationOrder {
    pub order: usize,
    /// The two tests never agreed; `order` is the larger of their
    /// individual verdicts.
    pub conflict: bool,
    pub steps: Vec<OrderStep>,
}

/// Smallest `d <= max_order` at which the `d`-th difference is judged
/// stationary by both tests. When the tests never agree, each test's own
/// smallest "stationary" order is taken and the larger one returned with
/// the conflict flag set; if either test never finds stationarity, error.
pub fn integration_order(s: &Series, cfg: &OrderConfig) -> Result<IntegrationOrder> {
    let mut y = s.contiguous_values()?;
    let mut steps = Vec::new();
    for d in 0..=cfg.max_order {
        if d > 0 {
            y = diff_values(&y);
        }
        let adf = adf_values(&y, cfg.adf_lags, cfg.adf_det)?;
        let kpss = kpss_values(&y, cfg.kpss_lag, cfg.kpss_det)?;
        let stationary = adf.rejects(cfg.alpha) && !kpss.rejects(cfg.alpha);
        steps.push(OrderStep { difference: d, adf, kpss, stationary });
        if stationary {
            return Ok(IntegrationOrder { order: d, conflict: false, steps });
        }
    }
    let adf_order = steps.iter().find(|s| s.adf.rejects(cfg.alpha)).map(|s| s.difference);
    let kpss_order = steps.iter().find(|s| !s.kpss.rejects(cfg.alpha)).map(|s| s.difference);
    match (adf_order, kpss_order) {
        (Some(a), Some(k)) => Ok(IntegrationOrder { order: a.max(k), conflict: true, steps }),
        _ => {
            let trail: Vec<String> = steps
                .iter()
                .map(|s| {
                    format!(
                        "d={}: ADF {:.3} (p {}), KPSS {:.3} (p {})",
                        s.difference,
                        s.adf.statistic,
                        s.adf.p_display(),
                        s.kpss.statistic,
                        s.kpss.p_display()
                    )
                })
                .collect();
            Err(Error::Failed(format!(
                "no integration order up to {} passes the ADF/KPSS rule; {}",
                cfg.max_order,
                trail.join("; ")
            )))
        }
    }
}
