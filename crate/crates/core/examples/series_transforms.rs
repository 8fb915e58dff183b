//! Series plumbing: CSV round trip, differencing, growth rates, temporal
//! aggregation, lags and alignment.
//!
//! ```bash
//! cargo run --release --example series_transforms
//! ```

use sentiment_shift::index::Series;
use sentiment_shift::period::{Frequency, Period};
use sentiment_shift::timeseries;

fn main() -> sentiment_shift::Result<()> {
    let csv = "period,value\n2001-01,100\n2001-02,101.5\n2001-03,\n2001-04,103\n2001-05,102.2\n2001-06,104.8\n";
    let s = Series::read_csv(csv.as_bytes())?;
    println!("read {} monthly points, {} present", s.len(), s.present().count());

    // gaps survive averaging into quarters only when a whole quarter is empty
    let q = timeseries::resample_mean(&s, Frequency::Quarterly)?;
    print!("quarterly means:\n{}", q.to_csv());

    let full = Series::from_values(Period::Month { year: 2001, month: 1 }, &[100.0, 101.5, 102.0, 103.0, 102.2, 104.8])?;
    print!("first differences:\n{}", timeseries::difference(&full, 1)?.to_csv());
    print!("annualised monthly growth:\n{}", timeseries::log_growth(&full, 1200.0)?.to_csv());

    // lagging relabels periods; alignment keeps rows where every series is observed
    let lagged = timeseries::lag(&full, 1)?;
    let a = timeseries::align(&[&full, &lagged])?;
    println!("aligned with its own lag: {} rows from {}", a.n_rows(), a.periods[0]);
    for t in 0..a.n_rows() {
        println!("  {}  {:?}", a.periods[t], a.row(t));
    }
    Ok(())
}
