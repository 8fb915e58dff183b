//! The Toda-Yamamoto causality procedure on two random walks where one
//! drives the other.
//!
//! ```bash
//! cargo run --release --example granger_pipeline
//! ```

use sentiment_shift::granger::{self, GrangerConfig};
use sentiment_shift::index::Series;
use sentiment_shift::montecarlo;
use sentiment_shift::period::Period;
use sentiment_shift::report;

fn main() -> sentiment_shift::Result<()> {
    // the change in `stress` loads on last month's change in `sentiment`
    let (x, y) = montecarlo::walk_pair(240, 0.6, &mut montecarlo::replication_rng(2015, 0));
    let start = Period::Month { year: 1996, month: 1 };
    let sentiment = Series::from_values(start, &x)?;
    let stress = Series::from_values(start, &y)?;

    let cfg = GrangerConfig { p_max: 12, ..Default::default() };
    let report = granger::toda_yamamoto(&sentiment, &stress, ["sentiment", "stress"], &cfg)?;
    print!("{}", report::granger_text(&report));

    // a failing step names itself and what had been established
    let short = Series::from_values(start, &x[..20])?;
    match granger::toda_yamamoto(&short, &stress, ["sentiment", "stress"], &cfg) {
        Ok(_) => println!("\nunexpected success on 20 observations"),
        Err(e) => println!("\non 20 observations: {e}"),
    }
    Ok(())
}
