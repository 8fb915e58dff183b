//! ADF and KPSS tests, and the joint rule that fixes a series' order of
//! integration.
//!
//! ```bash
//! cargo run --release --example unit_root
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sentiment_shift::index::Series;
use sentiment_shift::montecarlo;
use sentiment_shift::period::Period;
use sentiment_shift::report;
use sentiment_shift::stationarity::{self, Deterministic, OrderConfig};
use sentiment_shift::timeseries;

fn main() -> sentiment_shift::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Period::Month { year: 1996, month: 1 };
    let walk = Series::from_values(start, &montecarlo::random_walk(240, &mut rng))?;
    let noise = Series::from_values(start, &montecarlo::white_noise(240, &mut rng))?;
    let growth = timeseries::difference(&walk, 1)?;

    // six ADF lags with constant and trend, three KPSS lags with a level
    let mut rows = Vec::new();
    for (name, s) in [("random walk", &walk), ("its first difference", &growth), ("white noise", &noise)] {
        let adf = stationarity::adf_test(s, 6, Deterministic::ConstantTrend)?;
        let kpss = stationarity::kpss_test(s, 3, Deterministic::Constant)?;
        rows.push((name.to_owned(), adf, kpss));
    }
    print!("{}", report::unit_root_table(&rows));

    println!("\n5% ADF critical values for n = 240: constant {:.3}, constant and trend {:.3}",
        stationarity::adf_critical_value(Deterministic::Constant, 240, 0.05).unwrap_or(f64::NAN),
        stationarity::adf_critical_value(Deterministic::ConstantTrend, 240, 0.05).unwrap_or(f64::NAN));

    // order of integration: difference until ADF rejects and KPSS does not
    let cfg = OrderConfig::default();
    for (name, s) in [("random walk", &walk), ("white noise", &noise)] {
        let order = stationarity::integration_order(s, &cfg)?;
        println!("\n{name}: I({}){}", order.order, if order.conflict { " (tests disagreed)" } else { "" });
        for step in &order.steps {
            println!(
                "  d={}  ADF p {:<7} KPSS p {:<7} {}",
                step.difference,
                step.adf.p_display(),
                step.kpss.p_display(),
                if step.stationary { "stationary" } else { "not stationary" }
            );
        }
    }
    Ok(())
}
