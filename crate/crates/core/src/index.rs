//! From dated emotion counts to the relative sentiment shift series.
//!
//! RSS for a collection of articles is `(excitement - anxiety) / n_articles`.
//! A month or quarter is treated as one collection: counts are summed over
//! the period first and divided once (ratio of sums), which is not the same
//! as averaging daily RSS values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::ops::AddAssign;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::period::{Frequency, Period};
use crate::scanner::ArticleCounts;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmotionCounts {
    pub excitement: u64,
    pub anxiety: u64,
    pub n_articles: u64,
}

impl EmotionCounts {
    pub fn new(excitement: u64, anxiety: u64, n_articles: u64) -> Self {
        EmotionCounts { excitement, anxiety, n_articles }
    }

    /// Adds one kept article. Articles without the concept (in concept
    /// modes) contribute nothing, not even to the article count.
    pub fn add_article(&mut self, c: ArticleCounts) {
        if c.concept_present {
            self.excitement += c.excitement;
            self.anxiety += c.anxiety;
            self.n_articles += 1;
        }
    }

    pub fn rss(&self) -> Option<f64> {
        (self.n_articles > 0).then(|| (self.excitement as f64 - self.anxiety as f64) / self.n_articles as f64)
    }
}

impl AddAssign for EmotionCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.excitement += rhs.excitement;
        self.anxiety += rhs.anxiety;
        self.n_articles += rhs.n_articles;
    }
}

pub type DailyCounts = BTreeMap<NaiveDate, EmotionCounts>;

/// Sums daily counts into periods of `target` frequency.
pub fn aggregate(daily: &DailyCounts, target: Frequency) -> BTreeMap<Period, EmotionCounts> {
    let mut out = BTreeMap::new();
    for (&date, &c) in daily {
        *out.entry(Period::containing(date, target)).or_insert_with(EmotionCounts::default) += c;
    }
    out
}

/// Re-aggregates already-bucketed counts onto a coarser frequency.
pub fn reaggregate(counts: &BTreeMap<Period, EmotionCounts>, target: Frequency) -> BTreeMap<Period, EmotionCounts> {
    let mut out = BTreeMap::new();
    for (p, &c) in counts {
        *out.entry(p.coarsen(target)).or_insert_with(EmotionCounts::default) += c;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub period: Period,
    /// `None` marks a gap.
    pub value: Option<f64>,
}

/// An ordered, duplicate-free run of observations at one frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    freq: Frequency,
    points: Vec<Observation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub meta: Vec<String>,
}

impl Series {
    pub fn new(freq: Frequency, points: Vec<Observation>) -> Result<Self> {
        for w in points.windows(2) {
            if w[0].period >= w[1].period {
                return Err(Error::InvalidInput(format!(
                    "period labels must be strictly increasing ({} then {})",
                    w[0].period, w[1].period
                )));
            }
        }
        for o in &points {
            if o.period.frequency() != freq {
                return Err(Error::InvalidInput(format!("period {} is not {freq}", o.period)));
            }
            if o.value.is_some_and(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite value at {}", o.period)));
            }
        }
        Ok(Series { freq, points, meta: Vec::new() })
    }

    /// Consecutive periods starting at `start`, all present.
    pub fn from_values(start: Period, values: &[f64]) -> Result<Self> {
        let points = values
            .iter()
            .enumerate()
            .map(|(i, &v)| Observation { period: start.offset(i as i64), value: Some(v) })
            .collect();
        Series::new(start.frequency(), points)
    }

    pub fn from_pairs(freq: Frequency, pairs: impl IntoIterator<Item = (Period, f64)>) -> Result<Self> {
        Series::new(freq, pairs.into_iter().map(|(period, v)| Observation { period, value: Some(v) }).collect())
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.meta.push(note.into());
        self
    }

    pub fn freq(&self) -> Frequency {
        self.freq
    }

    pub fn points(&self) -> &[Observation] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, period: &Period) -> Option<f64> {
        self.points
            .binary_search_by(|o| o.period.cmp(period))
            .ok()
            .and_then(|i| self.points[i].value)
    }

    /// Values of the present observations.
    pub fn present(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().filter_map(|o| o.value)
    }

    /// All values, failing on the first gap. Periods need not be
    /// consecutive; a missing value is what counts as a gap here.
    pub fn values(&self) -> Result<Vec<f64>> {
        self.points
            .iter()
            .map(|o| o.value.ok_or_else(|| Error::Gap(o.period.to_string())))
            .collect()
    }

    /// All values, failing on a missing value or a skipped calendar period.
    pub fn contiguous_values(&self) -> Result<Vec<f64>> {
        for w in self.points.windows(2) {
            if w[0].period.next() != w[1].period {
                return Err(Error::Gap(w[0].period.next().to_string()));
            }
        }
        self.values()
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Series> {
        let points = self.points.iter().map(|o| Observation { period: o.period, value: o.value.map(&f) }).collect();
        let mut s = Series::new(self.freq, points)?;
        s.meta = self.meta.clone();
        Ok(s)
    }

    /// Keeps the observations whose period starts within `[from, to]`.
    pub fn restrict(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Series {
        let points = self
            .points
            .iter()
            .filter(|o| {
                let d = o.period.first_day();
                from.is_none_or(|f| d >= f) && to.is_none_or(|t| d <= t)
            })
            .copied()
            .collect();
        Series { freq: self.freq, points, meta: self.meta.clone() }
    }

    pub fn read_csv(reader: impl Read) -> Result<Series> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(csv_err)?.clone();
        let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
        let (pi, vi) = match (col("period"), col("value")) {
            (Some(p), Some(v)) => (p, v),
            _ => return Err(Error::InvalidInput("series CSV needs a `period,value` header".into())),
        };
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let line = i as u64 + 2;
            let period: Period = rec
                .get(pi)
                .unwrap_or("")
                .parse()
                .map_err(|e: Error| Error::Parse { line, message: e.to_string() })?;
            let raw = rec.get(vi).unwrap_or("");
            let value = match raw {
                "" | "NA" | "NaN" | "nan" | "." => None,
                v => Some(v.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("cannot parse value '{v}'"),
                })?),
            };
            points.push(Observation { period, value });
        }
        let freq = points
            .first()
            .map(|o| o.period.frequency())
            .ok_or_else(|| Error::InvalidInput("series CSV has no rows".into()))?;
        Series::new(freq, points)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Series> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Series::read_csv(f).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
            other => other,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("period,value\n");
        for o in &self.points {
            let _ = writeln!(out, "{},{}", o.period, fmt_opt(o.value));
        }
        out
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse { line, message: e.to_string() }
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// RSS per period, over the consecutive range from the first to the last
/// counted period. Periods without articles become gaps.
pub fn compute_rss(counts: &BTreeMap<Period, EmotionCounts>, freq: Frequency) -> Result<Series> {
    let (first, last) = match (counts.keys().next(), counts.keys().next_back()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Series::new(freq, Vec::new()),
    };
    let mut points = Vec::new();
    let mut p = first;
    loop {
        points.push(Observation { period: p, value: counts.get(&p).and_then(EmotionCounts::rss) });
        if p == last {
            break;
        }
        p = p.next();
    }
    Series::new(freq, points)
}

/// Standardises present values to mean zero and unit sample standard
/// deviation (divisor n - 1). Gaps stay gaps.
pub fn normalize(s: &Series) -> Result<Series> {
    let xs: Vec<f64> = s.present().collect();
    if xs.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: xs.len() });
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if sd == 0.0 || sd <= scale * 1e-14 {
        return Err(Error::Degenerate("cannot normalise a constant series".into()));
    }
    s.map_values(|x| (x - mean) / sd)
}

/// One row of the index builder output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexRow {
    pub period: Period,
    pub counts: EmotionCounts,
    pub rss_raw: Option<f64>,
    pub rss_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexTable {
    pub freq: Frequency,
    pub rows: Vec<IndexRow>,
    /// Why `rss_norm` is empty, when normalisation was impossible.
    pub normalization_note: Option<String>,
}

impl IndexTable {
    pub const HEADER: &'static str = "period,excitement,anxiety,n_articles,rss_raw,rss_norm";

    pub fn build(daily: &DailyCounts, freq: Frequency) -> Result<IndexTable> {
        let counts = aggregate(daily, freq);
        let raw = compute_rss(&counts, freq)?;
        let (norm, note) = match normalize(&raw) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let rows = raw
            .points()
            .iter()
            .enumerate()
            .map(|(i, o)| IndexRow {
                period: o.period,
                counts: counts.get(&o.period).copied().unwrap_or_default(),
                rss_raw: o.value,
                rss_norm: norm.as_ref().and_then(|n| n.points()[i].value),
            })
            .collect();
        Ok(IndexTable { freq, rows, normalization_note: note })
    }

    pub fn raw_series(&self) -> Series {
        let points = self.rows.iter().map(|r| Observation { period: r.period, value: r.rss_raw }).collect();
        Series::new(self.freq, points).expect("rows are ordered")
    }

    pub fn normalized_series(&self) -> Series {
        let points = self.rows.iter().map(|r| Observation { period: r.period, value: r.rss_norm }).collect();
        Series::new(self.freq, points).expect("rows are ordered")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.period,
                r.counts.excitement,
                r.counts.anxiety,
                r.counts.n_articles,
                fmt_opt(r.rss_raw),
                fmt_opt(r.rss_norm)
            );
        }
        out
    }
}
