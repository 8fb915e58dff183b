//! Calendar periods at daily, monthly and quarterly frequency.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Daily,
    Monthly,
    Quarterly,
}

impl Frequency {
    /// Rank by coarseness; a finer frequency has a lower rank.
    fn rank(self) -> u8 {
        match self {
            Frequency::Daily => 0,
            Frequency::Monthly => 1,
            Frequency::Quarterly => 2,
        }
    }

    pub fn is_finer_than(self, other: Frequency) -> bool {
        self.rank() < other.rank()
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frequency::Daily => "daily",
            Frequency::Monthly => "monthly",
            Frequency::Quarterly => "quarterly",
        })
    }
}

impl FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "daily" | "d" => Ok(Frequency::Daily),
            "monthly" | "m" => Ok(Frequency::Monthly),
            "quarterly" | "q" => Ok(Frequency::Quarterly),
            _ => Err(Error::InvalidInput(format!("unknown frequency '{s}'"))),
        }
    }
}

/// A single observation period. Labels render as `YYYY-MM-DD`, `YYYY-MM`
/// or `YYYY-Qn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Period {
    Day(NaiveDate),
    Month { year: i32, month: u32 },
    Quarter { year: i32, quarter: u32 },
}

impl Period {
    pub fn containing(date: NaiveDate, freq: Frequency) -> Period {
        match freq {
            Frequency::Daily => Period::Day(date),
            Frequency::Monthly => Period::Month { year: date.year(), month: date.month() },
            Frequency::Quarterly => Period::Quarter {
                year: date.year(),
                quarter: (date.month() - 1) / 3 + 1,
            },
        }
    }

    pub fn frequency(&self) -> Frequency {
        match self {
            Period::Day(_) => Frequency::Daily,
            Period::Month { .. } => Frequency::Monthly,
            Period::Quarter { .. } => Frequency::Quarterly,
        }
    }

    pub fn first_day(&self) -> NaiveDate {
        match *self {
            Period::Day(d) => d,
            Period::Month { year, month } => NaiveDate::from_ymd_opt(year, month, 1).expect("valid month"),
            Period::Quarter { year, quarter } => {
                NaiveDate::from_ymd_opt(year, (quarter - 1) * 3 + 1, 1).expect("valid quarter")
            }
        }
    }

    /// Maps this period onto the (same or coarser) frequency `freq`.
    pub fn coarsen(&self, freq: Frequency) -> Period {
        Period::containing(self.first_day(), freq)
    }

    /// Shifts by `k` periods of the same frequency (negative moves back).
    pub fn offset(&self, k: i64) -> Period {
        match *self {
            Period::Day(d) => {
                let moved = if k >= 0 {
                    d.checked_add_days(Days::new(k as u64))
                } else {
                    d.checked_sub_days(Days::new(k.unsigned_abs()))
                };
                Period::Day(moved.expect("date within chrono range"))
            }
            Period::Month { year, month } => {
                let idx = year as i64 * 12 + (month as i64 - 1) + k;
                Period::Month { year: idx.div_euclid(12) as i32, month: (idx.rem_euclid(12) + 1) as u32 }
            }
            Period::Quarter { year, quarter } => {
                let idx = year as i64 * 4 + (quarter as i64 - 1) + k;
                Period::Quarter { year: idx.div_euclid(4) as i32, quarter: (idx.rem_euclid(4) + 1) as u32 }
            }
        }
    }

    pub fn next(&self) -> Period {
        self.offset(1)
    }

    /// Number of periods from `self` to `later` (same frequency assumed).
    pub fn distance_to(&self, later: &Period) -> i64 {
        match (*self, *later) {
            (Period::Day(a), Period::Day(b)) => (b - a).num_days(),
            (Period::Month { year: y0, month: m0 }, Period::Month { year: y1, month: m1 }) => {
                (y1 as i64 * 12 + m1 as i64) - (y0 as i64 * 12 + m0 as i64)
            }
            (Period::Quarter { year: y0, quarter: q0 }, Period::Quarter { year: y1, quarter: q1 }) => {
                (y1 as i64 * 4 + q1 as i64) - (y0 as i64 * 4 + q0 as i64)
            }
            _ => panic!("distance between periods of different frequency"),
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::Day(d) => write!(f, "{}", d.format("%Y-%m-%d")),
            Period::Month { year, month } => write!(f, "{year:04}-{month:02}"),
            Period::Quarter { year, quarter } => write!(f, "{year:04}-Q{quarter}"),
        }
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("unrecognised period label '{s}'"));
        if let Some((y, q)) = s.split_once("-Q").or_else(|| s.split_once("-q")) {
            let year: i32 = y.parse().map_err(|_| bad())?;
            let quarter: u32 = q.parse().map_err(|_| bad())?;
            if !(1..=4).contains(&quarter) {
                return Err(bad());
            }
            return Ok(Period::Quarter { year, quarter });
        }
        match s.len() {
            10 => NaiveDate::parse_from_str(s, "%Y-%m-%d").map(Period::Day).map_err(|_| bad()),
            7 => {
                let (y, m) = s.split_once('-').ok_or_else(bad)?;
                let year: i32 = y.parse().map_err(|_| bad())?;
                let month: u32 = m.parse().map_err(|_| bad())?;
                if !(1..=12).contains(&month) {
                    return Err(bad());
                }
                Ok(Period::Month { year, month })
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for Period {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Period {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    #[test]
    fn labels_round_trip() {
        for label in ["2008-09-15", "1996-01", "2014-Q3"] {
            let p: Period = label.parse().unwrap();
            assert_eq!(p.to_string(), label);
        }
        assert!("2008-13".parse::<Period>().is_err());
        assert!("2008-Q5".parse::<Period>().is_err());
        assert!("2008-13-40".parse::<Period>().is_err());
    }

    #[test]
    fn containing_and_offsets() {
        assert_eq!(Period::containing(d("1996-11-30"), Frequency::Quarterly).to_string(), "1996-Q4");
        let m: Period = "1996-12".parse().unwrap();
        assert_eq!(m.next().to_string(), "1997-01");
        assert_eq!(m.offset(-12).to_string(), "1995-12");
        let q: Period = "2000-Q1".parse().unwrap();
        assert_eq!(q.offset(-1).to_string(), "1999-Q4");
        assert_eq!(q.distance_to(&q.offset(9)), 9);
        let day = Period::Day(d("2008-02-28"));
        assert_eq!(day.offset(2).to_string(), "2008-03-01");
    }
}
