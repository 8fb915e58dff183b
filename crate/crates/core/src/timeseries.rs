//! Differencing, resampling, lagging and alignment of [`Series`].

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::{Observation, Series};
use crate::period::{Frequency, Period};

/// Applies `y_t = x_t - x_{t-1}` `order` times. The first `order` periods are dropped.
pub fn difference(s: &Series, order: usize) -> Result<Series> {
    if order == 0 {
        return Err(Error::InvalidInput("difference order must be at least 1".into()));
    }
    let mut xs = s.contiguous_values()?;
    if xs.len() <= order {
        return Err(Error::TooShort { needed: order + 1, got: xs.len() });
    }
    for _ in 0..order {
        xs = diff_values(&xs);
    }
    let start = s.points()[order].period;
    let mut out = Series::from_values(start, &xs)?;
    out.meta = s.meta.clone();
    out.meta.push(format!("difference order {order}"));
    Ok(out)
}

/// First differences of a plain slice.
pub fn diff_values(xs: &[f64]) -> Vec<f64> {
    xs.windows(2).map(|w| w[1] - w[0]).collect()
}

pub fn cumulative_sum(s: &Series) -> Result<Series> {
    let xs = s.contiguous_values()?;
    let mut acc = 0.0;
    let sums: Vec<f64> = xs
        .iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect();
    match s.points().first() {
        Some(o) => Series::from_values(o.period, &sums),
        None => Series::new(s.freq(), Vec::new()),
    }
}

/// Growth rate `scale * (ln x_t - ln x_{t-1})`. With `scale = 400` a
/// quarterly level series becomes annualised percent growth.
pub fn log_growth(s: &Series, scale: f64) -> Result<Series> {
    let xs = s.contiguous_values()?;
    if let Some(o) = s.points().iter().find(|o| o.value.is_some_and(|v| v <= 0.0)) {
        return Err(Error::InvalidInput(format!("log growth needs positive levels (period {})", o.period)));
    }
    if xs.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: xs.len() });
    }
    let g: Vec<f64> = xs.windows(2).map(|w| scale * (w[1].ln() - w[0].ln())).collect();
    Series::from_values(s.points()[1].period, &g)
}

/// Averages observations within each `target` period. A target period
/// inside the covered range with no present observations is a gap.
pub fn resample_mean(s: &Series, target: Frequency) -> Result<Series> {
    if !s.freq().is_finer_than(target) {
        return Err(Error::InvalidInput(format!("cannot resample {} data to {target}", s.freq())));
    }
    let mut groups: BTreeMap<Period, (f64, usize)> = BTreeMap::new();
    for o in s.points() {
        let entry = groups.entry(o.period.coarsen(target)).or_insert((0.0, 0));
        if let Some(v) = o.value {
            entry.0 += v;
            entry.1 += 1;
        }
    }
    let (first, last) = match (groups.keys().next(), groups.keys().next_back()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Series::new(target, Vec::new()),
    };
    let mut points = Vec::new();
    let mut p = first;
    loop {
        let value = groups.get(&p).and_then(|&(sum, n)| (n > 0).then(|| sum / n as f64));
        points.push(Observation { period: p, value });
        if p == last {
            break;
        }
        p = p.next();
    }
    let mut out = Series::new(target, points)?;
    out.meta = s.meta.clone();
    out.meta.push(format!("{target} mean of {} observations", s.freq()));
    Ok(out)
}

/// Moves every observation `k` periods later, so the value observed in
/// period `t` is labelled `t + k`.
pub fn lag(s: &Series, k: usize) -> Result<Series> {
    if k == 0 {
        return Err(Error::InvalidInput("lag must be at least 1".into()));
    }
    let points = s
        .points()
        .iter()
        .map(|o| Observation { period: o.period.offset(k as i64), value: o.value })
        .collect();
    let mut out = Series::new(s.freq(), points)?;
    out.meta = s.meta.clone();
    out.meta.push(format!("lagged {k}"));
    Ok(out)
}

/// Jointly observed rows of several series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aligned {
    pub periods: Vec<Period>,
    /// One column per input series.
    pub columns: Vec<Vec<f64>>,
}

impl Aligned {
    pub fn n_rows(&self) -> usize {
        self.periods.len()
    }

    pub fn row(&self, t: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[t]).collect()
    }

    /// Fails if the retained periods skip a calendar period.
    pub fn ensure_contiguous(&self) -> Result<()> {
        for w in self.periods.windows(2) {
            if w[0].next() != w[1] {
                return Err(Error::Gap(w[0].next().to_string()));
            }
        }
        Ok(())
    }
}

/// Inner-joins series on their period labels, dropping any row where some
/// series is missing.
pub fn align(series: &[&Series]) -> Result<Aligned> {
    let first = series.first().ok_or_else(|| Error::InvalidInput("nothing to align".into()))?;
    if let Some(s) = series.iter().find(|s| s.freq() != first.freq()) {
        return Err(Error::InvalidInput(format!("cannot align {} with {} data", first.freq(), s.freq())));
    }
    let mut periods = Vec::new();
    let mut columns = vec![Vec::new(); series.len()];
    'rows: for o in first.points() {
        let mut row = Vec::with_capacity(series.len());
        for s in series {
            match s.get(&o.period) {
                Some(v) => row.push(v),
                None => continue 'rows,
            }
        }
        periods.push(o.period);
        for (c, v) in columns.iter_mut().zip(row) {
            c.push(v);
        }
    }
    if periods.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(Aligned { periods, columns })
}
