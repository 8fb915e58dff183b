//! Size and power simulations for every statistical procedure, at one tenth
//! of the acceptance replication counts.
//!
//! ```bash
//! cargo run --release --example monte_carlo_selftest [master-seed]
//! ```

use sentiment_shift::montecarlo::{self, SuiteSize};

fn main() -> sentiment_shift::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20150101);
    let full = SuiteSize::default();
    let size = SuiteSize {
        unit_root: full.unit_root / 10,
        order: full.order / 10,
        aic: full.aic / 10,
        diagnostics: full.diagnostics / 10,
        cusum: full.cusum / 10,
        granger: full.granger / 10,
    };
    // results depend only on the seed, never on the thread count
    let checks = montecarlo::suite(seed, size)?;
    println!("master seed {seed}");
    for c in &checks {
        println!("{}  {:<60} {:>7.3}  want {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.value, c.band);
    }
    Ok(())
}
