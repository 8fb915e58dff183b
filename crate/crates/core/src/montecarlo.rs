//! Simulation checks of size and power for the statistical procedures.
//!
//! Every replication draws from its own ChaCha stream derived from a master
//! seed and the replication number, so results do not depend on the number
//! of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::granger::{self, GrangerConfig};
use crate::index::Series;
use crate::period::Period;
use crate::stationarity::{self, Deterministic, OrderConfig};
use crate::var;

pub fn replication_rng(master: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(rep);
    rng
}

/// Share of replications for which `trial` returns true.
pub fn rejection_rate<F>(reps: usize, master: u64, trial: F) -> Result<f64>
where
    F: Fn(&mut ChaCha8Rng) -> Result<bool> + Sync,
{
    let outcomes: Vec<bool> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| trial(&mut replication_rng(master, rep)))
        .collect::<Result<_>>()?;
    Ok(outcomes.iter().filter(|&&b| b).count() as f64 / reps as f64)
}

pub fn white_noise(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn random_walk(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut acc = 0.0;
    (0..n)
        .map(|_| {
            acc += rng.sample::<f64, _>(StandardNormal);
            acc
        })
        .collect()
}

pub fn ar1(n: usize, phi: f64, rng: &mut impl Rng) -> Vec<f64> {
    let burn = 100;
    let mut y = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..n + burn {
        y = phi * y + rng.sample::<f64, _>(StandardNormal);
        if t >= burn {
            out.push(y);
        }
    }
    out
}

/// `y_t = c + Σ A_l y_{t-l} + u_t` with `u_t = rho * u_{t-1} + e_t`,
/// `e_t` independent standard normal.
#[derive(Debug, Clone, PartialEq)]
pub struct VarProcess {
    pub intercept: Vec<f64>,
    /// `a[l][i][j]`: effect of variable `j` at lag `l + 1` on variable `i`.
    pub a: Vec<Vec<Vec<f64>>>,
    pub error_ar: f64,
}

impl VarProcess {
    pub fn new(intercept: Vec<f64>, a: Vec<Vec<Vec<f64>>>) -> Self {
        VarProcess { intercept, a, error_ar: 0.0 }
    }

    pub fn k(&self) -> usize {
        self.intercept.len()
    }

    /// `t` observations after a burn-in of 200; columns are variables.
    pub fn simulate(&self, t: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
        self.simulate_with_shift(t, rng, None)
    }

    /// As [`simulate`](Self::simulate), adding `shift[i]` to equation `i`'s
    /// intercept from observation `at` on.
    pub fn simulate_with_shift(&self, t: usize, rng: &mut impl Rng, shift: Option<(usize, &[f64])>) -> Vec<Vec<f64>> {
        let (k, p, burn) = (self.k(), self.a.len(), 200);
        let total = t + burn;
        let mut y = vec![vec![0.0; total]; k];
        let mut u = vec![0.0; k];
        for s in 0..total {
            for i in 0..k {
                u[i] = self.error_ar * u[i] + rng.sample::<f64, _>(StandardNormal);
            }
            for i in 0..k {
                let mut v = self.intercept[i] + u[i];
                if let Some((at, delta)) = shift {
                    if s >= burn + at {
                        v += delta[i];
                    }
                }
                for l in 0..p.min(s) {
                    for j in 0..k {
                        v += self.a[l][i][j] * y[j][s - l - 1];
                    }
                }
                y[i][s] = v;
            }
        }
        y.into_iter().map(|c| c[burn..].to_vec()).collect()
    }
}

/// The bivariate VAR(2) used for coefficient recovery.
pub fn recovery_process() -> VarProcess {
    VarProcess::new(vec![0.5, -0.2], vec![vec![vec![0.5, 0.1], vec![0.2, 0.3]], vec![vec![-0.2, 0.0], vec![0.1, 0.2]]])
}

/// A bivariate VAR(3) with a sizable third lag.
pub fn var3_process() -> VarProcess {
    VarProcess::new(
        vec![0.1, 0.1],
        vec![
            vec![vec![0.3, 0.1], vec![0.0, 0.2]],
            vec![vec![0.1, 0.0], vec![0.1, 0.1]],
            vec![vec![0.3, 0.0], vec![0.2, -0.3]],
        ],
    )
}

pub fn var1_process() -> VarProcess {
    VarProcess::new(vec![0.2, -0.1], vec![vec![vec![0.5, 0.1], vec![0.2, 0.3]]])
}

fn monthly(values: &[f64]) -> Result<Series> {
    Series::from_values(Period::Month { year: 1990, month: 1 }, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Band {
    Within { lo: f64, hi: f64 },
    AtLeast { min: f64 },
    AtMost { max: f64 },
    Above { min: f64 },
}

impl Band {
    pub fn contains(&self, v: f64) -> bool {
        match *self {
            Band::Within { lo, hi } => (lo..=hi).contains(&v),
            Band::AtLeast { min } => v >= min,
            Band::AtMost { max } => v <= max,
            Band::Above { min } => v > min,
        }
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Band::Within { lo, hi } => write!(f, "in [{lo}, {hi}]"),
            Band::AtLeast { min } => write!(f, ">= {min}"),
            Band::AtMost { max } => write!(f, "<= {max}"),
            Band::Above { min } => write!(f, "> {min}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub replications: usize,
    pub value: f64,
    pub band: Band,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: &str, replications: usize, value: f64, band: Band) -> Self {
        CheckResult { name: name.to_owned(), replications, value, band, pass: band.contains(value) }
    }
}

pub const UNIT_ROOT_N: usize = 500;
pub const ADF_LAGS: usize = 6;
pub const KPSS_LAG: usize = 3;

/// ADF rejection rate at 5%: random walks (size) or AR(1) with `phi` (power).
pub fn adf_rejection_rate(phi: Option<f64>, reps: usize, master: u64) -> Result<f64> {
    rejection_rate(reps, master, |rng| {
        let y = match phi {
            Some(phi) => ar1(UNIT_ROOT_N, phi, rng),
            None => random_walk(UNIT_ROOT_N, rng),
        };
        Ok(stationarity::adf_values(&y, ADF_LAGS, Deterministic::Constant)?.p_value < 0.05)
    })
}

/// KPSS rejection rate at 5%: white noise (size) or random walks (power).
pub fn kpss_rejection_rate(random_walks: bool, reps: usize, master: u64) -> Result<f64> {
    rejection_rate(reps, master, |rng| {
        let y = if random_walks { random_walk(UNIT_ROOT_N, rng) } else { white_noise(UNIT_ROOT_N, rng) };
        Ok(stationarity::kpss_values(&y, KPSS_LAG, Deterministic::Constant)?.p_value < 0.05)
    })
}

/// Share of replications whose integration order equals `expected`.
pub fn integration_order_hit_rate(random_walks: bool, reps: usize, master: u64) -> Result<f64> {
    let expected = usize::from(random_walks);
    let cfg = OrderConfig::default();
    rejection_rate(reps, master, |rng| {
        let y = if random_walks { random_walk(UNIT_ROOT_N, rng) } else { white_noise(UNIT_ROOT_N, rng) };
        Ok(stationarity::integration_order(&monthly(&y)?, &cfg).is_ok_and(|o| o.order == expected))
    })
}

/// Largest absolute coefficient error of a VAR(2) fitted to `t` draws.
pub fn var_recovery_error(t: usize, seed: u64) -> Result<f64> {
    let proc = recovery_process();
    let data = proc.simulate(t, &mut replication_rng(seed, 0));
    let m = var::fit_var(&data, 2, true)?;
    let mut worst = 0.0f64;
    for (l, al) in proc.a.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((m.a[l][(i, j)] - al[i][j]).abs());
            }
        }
    }
    for i in 0..2 {
        worst = worst.max((m.intercepts[i] - proc.intercept[i]).abs());
    }
    Ok(worst)
}

/// Share of VAR(3) samples of length `t` for which AIC picks lag 3.
pub fn aic_hit_rate(t: usize, p_max: usize, reps: usize, master: u64) -> Result<f64> {
    let proc = var3_process();
    rejection_rate(reps, master, |rng| Ok(var::select_lag_aic(&proc.simulate(t, rng), p_max, true)?.selected == 3))
}

pub const DIAGNOSTIC_T: usize = 500;

/// Portmanteau (h = 16) rejection rate at 5%. With `under_lag`, a VAR(1)
/// is fitted to VAR(3) data; otherwise a VAR(2) to VAR(2) data.
pub fn portmanteau_rejection_rate(under_lag: bool, reps: usize, master: u64) -> Result<f64> {
    let (proc, p) = if under_lag { (var3_process(), 1) } else { (recovery_process(), 2) };
    rejection_rate(reps, master, |rng| {
        let m = var::fit_var(&proc.simulate(DIAGNOSTIC_T, rng), p, true)?;
        Ok(var::portmanteau_test(&m, var::default_portmanteau_lags(p))?.p_value < 0.05)
    })
}

/// Breusch-Godfrey (h = 5) rejection rate at 5% for a VAR(1) whose errors
/// follow an AR(1) with coefficient `error_ar` (zero for size).
pub fn breusch_godfrey_rejection_rate(error_ar: f64, reps: usize, master: u64) -> Result<f64> {
    let mut proc = var1_process();
    proc.error_ar = error_ar;
    rejection_rate(reps, master, |rng| {
        let m = var::fit_var(&proc.simulate(DIAGNOSTIC_T, rng), 1, true)?;
        Ok(var::breusch_godfrey_test(&m, var::DEFAULT_BG_LAGS)?.p_value < 0.05)
    })
}

pub const CUSUM_T: usize = 500;

/// OLS-CUSUM boundary crossing rate in the first equation of a fitted
/// VAR(1); `break_size` (in error standard deviations) shifts that
/// equation's intercept at mid-sample.
pub fn cusum_crossing_rate(break_size: f64, reps: usize, master: u64) -> Result<f64> {
    let proc = var1_process();
    let shift = [break_size, 0.0];
    rejection_rate(reps, master, |rng| {
        let data = if break_size == 0.0 {
            proc.simulate(CUSUM_T, rng)
        } else {
            proc.simulate_with_shift(CUSUM_T, rng, Some((CUSUM_T / 2, &shift)))
        };
        let m = var::fit_var(&data, 1, true)?;
        Ok(var::ols_cusum(&m)?[0].crossed)
    })
}

pub const GRANGER_T: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CausalityRates {
    /// Rejection rate of `x -> y`.
    pub forward: f64,
    /// Rejection rate of `y -> x`.
    pub backward: f64,
    /// Share of replications rejecting in at least one direction.
    pub either: f64,
    /// Share of replications where the procedure stopped with an error
    /// (counted as finding no causality in either direction).
    pub failed: f64,
}

fn causality_rates(outcomes: &[Option<(bool, bool)>]) -> CausalityRates {
    let n = outcomes.len() as f64;
    let share = |f: &dyn Fn(&(bool, bool)) -> bool| outcomes.iter().flatten().filter(|o| f(o)).count() as f64 / n;
    CausalityRates {
        forward: share(&|o| o.0),
        backward: share(&|o| o.1),
        either: share(&|o| o.0 || o.1),
        failed: outcomes.iter().filter(|o| o.is_none()).count() as f64 / n,
    }
}

/// Pairs `(x, y)` of random walks; with `coupling != 0`, `Δy_t` loads on `Δx_{t-1}`.
pub fn walk_pair(t: usize, coupling: f64, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    let dx = white_noise(t, rng);
    let e = white_noise(t, rng);
    let (mut x, mut y) = (vec![0.0; t], vec![0.0; t]);
    for s in 1..t {
        x[s] = x[s - 1] + dx[s];
        y[s] = y[s - 1] + coupling * dx[s - 1] + e[s];
    }
    (x, y)
}

/// Toda-Yamamoto rejection rates at 5% over `reps` walk pairs. A
/// replication in which the procedure itself fails (for example, residual
/// autocorrelation that no lag up to `p_max` removes) counts as no finding.
pub fn toda_yamamoto_rates(coupling: f64, reps: usize, master: u64, cfg: &GrangerConfig) -> Result<CausalityRates> {
    let outcomes: Vec<Option<(bool, bool)>> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let (x, y) = walk_pair(GRANGER_T, coupling, &mut replication_rng(master, rep));
            match granger::toda_yamamoto(&monthly(&x)?, &monthly(&y)?, ["x", "y"], cfg) {
                Ok(r) => Ok(Some((r.wald[0].p_value < 0.05, r.wald[1].p_value < 0.05))),
                Err(Error::Step { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    Ok(causality_rates(&outcomes))
}

/// Plain levels Granger test without augmentation: AIC lag, VAR(p), Wald on all p lags.
pub fn naive_granger_rates(coupling: f64, reps: usize, master: u64, p_max: usize) -> Result<CausalityRates> {
    let outcomes: Vec<Option<(bool, bool)>> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let (x, y) = walk_pair(GRANGER_T, coupling, &mut replication_rng(master, rep));
            let data = vec![x, y];
            let p = var::select_lag_aic(&data, p_max, true)?.selected;
            let m = var::fit_var(&data, p, true)?;
            Ok(Some((granger::wald_test(&m, 0, 1, p)?.2 < 0.05, granger::wald_test(&m, 1, 0, p)?.2 < 0.05)))
        })
        .collect::<Result<_>>()?;
    Ok(causality_rates(&outcomes))
}

/// Replication counts for [`suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteSize {
    pub unit_root: usize,
    pub order: usize,
    pub aic: usize,
    pub diagnostics: usize,
    pub cusum: usize,
    pub granger: usize,
}

impl Default for SuiteSize {
    fn default() -> Self {
        SuiteSize { unit_root: 1000, order: 200, aic: 100, diagnostics: 1000, cusum: 1000, granger: 500 }
    }
}

/// Runs every simulation check with seeds derived from `master`.
pub fn suite(master: u64, size: SuiteSize) -> Result<Vec<CheckResult>> {
    let seed = |k: u64| master.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k);
    let size_band = Band::Within { lo: 0.03, hi: 0.07 };
    let granger_cfg = GrangerConfig::default();
    let ty_null = toda_yamamoto_rates(0.0, size.granger, seed(14), &granger_cfg)?;
    let naive_null = naive_granger_rates(0.0, size.granger, seed(14), granger_cfg.p_max)?;
    let ty_power = toda_yamamoto_rates(0.5, size.granger, seed(15), &granger_cfg)?;
    Ok(vec![
        CheckResult::new("ADF size (random walk)", size.unit_root, adf_rejection_rate(None, size.unit_root, seed(1))?, size_band),
        CheckResult::new("ADF power (AR(1), phi 0.5)", size.unit_root, adf_rejection_rate(Some(0.5), size.unit_root, seed(2))?, Band::AtLeast { min: 0.95 }),
        CheckResult::new("KPSS size (white noise)", size.unit_root, kpss_rejection_rate(false, size.unit_root, seed(3))?, size_band),
        CheckResult::new("KPSS power (random walk)", size.unit_root, kpss_rejection_rate(true, size.unit_root, seed(4))?, Band::AtLeast { min: 0.95 }),
        CheckResult::new("integration order of white noise is 0", size.order, integration_order_hit_rate(false, size.order, seed(5))?, Band::AtLeast { min: 0.95 }),
        CheckResult::new("integration order of random walk is 1", size.order, integration_order_hit_rate(true, size.order, seed(6))?, Band::AtLeast { min: 0.95 }),
        CheckResult::new("VAR(2) max coefficient error, T=10000", 1, var_recovery_error(10_000, seed(7))?, Band::AtMost { max: 0.05 }),
        CheckResult::new("AIC picks lag 3 of a VAR(3), T=2000", size.aic, aic_hit_rate(2000, 20, size.aic, seed(8))?, Band::AtLeast { min: 0.6 }),
        CheckResult::new("Portmanteau size", size.diagnostics, portmanteau_rejection_rate(false, size.diagnostics, seed(9))?, size_band),
        CheckResult::new("Portmanteau power (under-lagged)", size.diagnostics, portmanteau_rejection_rate(true, size.diagnostics, seed(10))?, Band::AtLeast { min: 0.8 }),
        CheckResult::new("Breusch-Godfrey size", size.diagnostics, breusch_godfrey_rejection_rate(0.0, size.diagnostics, seed(11))?, size_band),
        CheckResult::new("Breusch-Godfrey power (AR(1) errors, 0.5)", size.diagnostics, breusch_godfrey_rejection_rate(0.5, size.diagnostics, seed(16))?, Band::AtLeast { min: 0.8 }),
        CheckResult::new("OLS-CUSUM false alarms (stable VAR)", size.cusum, cusum_crossing_rate(0.0, size.cusum, seed(12))?, Band::AtMost { max: 0.07 }),
        CheckResult::new("OLS-CUSUM detects a 5 sd mid-sample break", size.cusum, cusum_crossing_rate(5.0, size.cusum, seed(13))?, Band::AtLeast { min: 0.9 }),
        CheckResult::new("Toda-Yamamoto spurious x -> y (independent walks)", size.granger, ty_null.forward, Band::AtMost { max: 0.1 }),
        CheckResult::new("Toda-Yamamoto spurious y -> x (independent walks)", size.granger, ty_null.backward, Band::AtMost { max: 0.1 }),
        CheckResult::new("over-rejection of the unaugmented test minus Toda-Yamamoto", size.granger, naive_null.either - ty_null.either, Band::Above { min: 0.0 }),
        CheckResult::new("Toda-Yamamoto detects x -> y", size.granger, ty_power.forward, Band::AtLeast { min: 0.8 }),
        CheckResult::new("Toda-Yamamoto spurious, either direction (informational)", size.granger, ty_null.either, Band::AtMost { max: 1.0 }),
        CheckResult::new("Toda-Yamamoto procedure failures (independent walks)", size.granger, ty_null.failed, Band::AtMost { max: 1.0 }),
        CheckResult::new("Toda-Yamamoto procedure failures (causal pairs)", size.granger, ty_power.failed, Band::AtMost { max: 1.0 }),
    ])
}
