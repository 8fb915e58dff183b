//! Does a lagged extra series add explanatory power over a consensus
//! forecast? Simulated quarterly data with a known answer.
//!
//! ```bash
//! cargo run --release --example forecast_augmentation
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sentiment_shift::index::Series;
use sentiment_shift::period::Period;
use sentiment_shift::regress::{self, AugmentationNames};
use sentiment_shift::report;
use sentiment_shift::timeseries;

fn main() -> sentiment_shift::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1996);
    let mut normal = || rng.sample::<f64, _>(StandardNormal);
    let n = 80;
    let level: Vec<f64> = (0..n).scan(100.0, |g, _| { *g *= 1.0 + 0.006 + 0.005 * normal(); Some(*g) }).collect();
    let extra: Vec<f64> = (0..n).map(|_| normal()).collect();

    let start = Period::Quarter { year: 1994, quarter: 1 };
    let gdp = Series::from_values(start, &level)?;
    // annualised percent growth, 400 * (ln g_t - ln g_{t-1})
    let growth = timeseries::log_growth(&gdp, 400.0)?;
    let g = growth.values()?;
    // the forecast sees part of the truth; the extra series carries news a quarter early
    let forecast: Vec<f64> = g.iter().map(|v| 0.6 * v + 1.0 + 1.5 * normal()).collect();
    let mut actual = g.clone();
    for t in 1..actual.len() {
        actual[t] += 0.8 * extra[t];
    }
    let q = growth.points()[0].period;
    let actual = Series::from_values(q, &actual)?;
    let forecast = Series::from_values(q, &forecast)?;
    let extra = Series::from_values(start, &extra)?;

    // the extra series enters at t - 1; the forecast is labelled by its target quarter
    let study = regress::augmentation_study(&actual, &forecast, &extra, 1, 0, &AugmentationNames::default())?;
    print!("{}", report::regression_table(&["(1)", "(2)"], &[&study.restricted, &study.augmented]));
    println!(
        "\nsample {} to {}, adjusted R2 gain ratio {:.2}",
        study.periods[0],
        study.periods[study.periods.len() - 1],
        study.adj_r_squared_gain_ratio
    );
    Ok(())
}
