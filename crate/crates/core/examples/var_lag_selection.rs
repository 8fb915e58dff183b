//! VAR estimation, AIC lag selection, residual autocorrelation tests and
//! OLS-CUSUM stability on a simulated bivariate VAR(3).
//!
//! ```bash
//! cargo run --release --example var_lag_selection
//! ```

use sentiment_shift::montecarlo;
use sentiment_shift::var::{self, DiagnosticSettings};

fn main() -> sentiment_shift::Result<()> {
    let data = montecarlo::var3_process().simulate(600, &mut montecarlo::replication_rng(4, 0));

    // every candidate lag is fitted on the same sample
    let sel = var::select_lag_aic(&data, 8, true)?;
    println!("AIC on {} common observations:", sel.t_eff);
    for row in &sel.table {
        println!("  p={}  {:>9.4}{}", row.p, row.aic, if row.p == sel.selected { "  <- selected" } else { "" });
    }

    let m = var::fit_var(&data, sel.selected, true)?;
    println!("\nVAR({}) lag-1 coefficients:", m.p);
    for i in 0..m.k {
        println!("  [{:>7.3} {:>7.3}]", m.a[0][(i, 0)], m.a[0][(i, 1)]);
    }

    // an under-lagged model fails the diagnostics, so escalation raises p
    let settings = DiagnosticSettings::default();
    let (accepted, trail) = match var::escalate_lags(&data, 1, 8, true, &settings) {
        Ok(v) => v,
        Err(e) => {
            // the error carries every diagnostic run before giving up
            println!("\nlag escalation failed: {e}");
            return Ok(());
        }
    };
    println!("\nlag escalation from p=1:");
    for d in &trail {
        println!(
            "  p={}  Portmanteau {:>7.2} (df {}, p {:.4})  Breusch-Godfrey {:>6.2} (df {}, p {:.4})",
            d.p, d.portmanteau.statistic, d.portmanteau.df, d.portmanteau.p_value,
            d.breusch_godfrey.statistic, d.breusch_godfrey.df, d.breusch_godfrey.p_value
        );
    }
    println!("  accepted p = {}", accepted.p);

    for c in var::ols_cusum(&accepted)? {
        println!(
            "\nOLS-CUSUM, equation {}: sup |W| = {:.3} against {:.3}, {}",
            c.equation, c.sup_abs, c.boundary, if c.crossed { "unstable" } else { "stable" }
        );
        println!("  first rows of the plotting CSV:");
        for line in c.to_csv().lines().take(4) {
            println!("    {line}");
        }
    }
    Ok(())
}
