//! Plain-text tables for the command-line reports.

use std::fmt::Write as _;

use crate::granger::GrangerReport;
use crate::regress::OlsResult;
use crate::stationarity::UnitRootResult;

/// `***` below 0.01, `**` below 0.05, `*` below 0.1.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

/// Two significant digits, switching to exponent notation below 0.001.
pub fn fmt_p(p: f64) -> String {
    if p == 0.0 {
        "0".into()
    } else if p < 0.001 {
        format!("{p:.1e}")
    } else {
        format!("{p:.4}")
    }
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells.zip(&widths).enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        writeln!(out, "{}", parts.join("  ").trim_end()).expect("write to string");
    };
    line(&mut out, &mut header.iter().copied());
    for r in rows {
        line(&mut out, &mut r.iter().map(String::as_str));
    }
    out
}

/// One row per variable: ADF statistic and p-value, KPSS statistic and p-value.
pub fn unit_root_table(rows: &[(String, UnitRootResult, UnitRootResult)]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(name, adf, kpss)| {
            vec![name.clone(), format!("{:.2}", adf.statistic), adf.p_display(), format!("{:.3}", kpss.statistic), kpss.p_display()]
        })
        .collect();
    table(&["Variable", "ADF", "p-value", "KPSS", "p-value"], &body)
}

pub fn single_test(r: &UnitRootResult) -> String {
    format!(
        "{} test ({} lags, {} terms, n = {})\nstatistic  {:.4}\np-value    {}\n",
        r.test.to_uppercase(),
        r.lags,
        r.det_terms,
        r.n,
        r.statistic,
        r.p_display()
    )
}

/// Coefficient tables side by side, one column per model, in the usual
/// estimate-over-standard-error layout.
pub fn regression_table(titles: &[&str], models: &[&OlsResult]) -> String {
    let mut names: Vec<&str> = Vec::new();
    for m in models {
        for c in &m.coefficients {
            if !names.contains(&c.name.as_str()) {
                names.push(&c.name);
            }
        }
    }
    // intercept goes last, as in conventional regression tables
    if let Some(i) = names.iter().position(|n| *n == crate::regress::INTERCEPT) {
        let c = names.remove(i);
        names.push(c);
    }
    let mut rows = Vec::new();
    for name in &names {
        let mut est = vec![name.to_string()];
        let mut se = vec![String::new()];
        for m in models {
            match m.coefficient(name) {
                Some(c) => {
                    est.push(format!("{:.3}{}", c.estimate, stars(c.p_value)));
                    se.push(format!("({:.3})", c.std_error));
                }
                None => {
                    est.push(String::new());
                    se.push(String::new());
                }
            }
        }
        rows.push(est);
        rows.push(se);
    }
    let stat_row = |label: &str, f: &dyn Fn(&OlsResult) -> String| {
        std::iter::once(label.to_owned()).chain(models.iter().map(|m| f(m))).collect::<Vec<_>>()
    };
    rows.push(stat_row("Observations", &|m| m.n.to_string()));
    rows.push(stat_row("R2", &|m| format!("{:.3}", m.r_squared)));
    rows.push(stat_row("Adjusted R2", &|m| format!("{:.3}", m.adj_r_squared)));
    rows.push(stat_row("Residual Std. Error", &|m| format!("{:.3} (df = {})", m.residual_std_error, m.df_resid)));
    rows.push(stat_row("F Statistic", &|m| match &m.f_test {
        Some(f) => format!("{:.3}{} (df = {}; {})", f.statistic, stars(f.p_value), f.df_num, f.df_den),
        None => "-".into(),
    }));
    let mut header = vec![""];
    header.extend_from_slice(titles);
    let mut out = table(&header, &rows);
    out.push_str("Note: *p<0.1; **p<0.05; ***p<0.01\n");
    out
}

pub fn granger_text(r: &GrangerReport) -> String {
    let mut out = String::new();
    let [x, y] = &r.names;
    writeln!(out, "Toda-Yamamoto causality: {x} and {y}").unwrap();
    writeln!(out, "sample {} to {} ({} observations)\n", r.first_period, r.last_period, r.n_obs).unwrap();

    match &r.orders {
        Some(orders) => {
            writeln!(out, "Unit-root tests").unwrap();
            let mut rows = Vec::new();
            for (name, o) in r.names.iter().zip(orders) {
                for s in &o.steps {
                    let label = if s.difference == 0 { format!("{name} Level") } else { format!("{name} Diff{}", s.difference) };
                    rows.push((label, s.adf.clone(), s.kpss.clone()));
                }
            }
            out.push_str(&unit_root_table(&rows));
            for (name, o) in r.names.iter().zip(orders) {
                writeln!(out, "{name}: I({}){}", o.order, if o.conflict { " (ADF and KPSS disagree; larger order kept)" } else { "" }).unwrap();
            }
            writeln!(out, "m = {}\n", r.m).unwrap();
        }
        None => writeln!(out, "m = {} (fixed)\n", r.m).unwrap(),
    }

    writeln!(out, "AIC by lag (common sample of {} observations)", r.aic.t_eff).unwrap();
    let rows: Vec<Vec<String>> = r.aic.table.iter().map(|a| vec![a.p.to_string(), format!("{:.4}", a.aic)]).collect();
    out.push_str(&table(&["Lag", "AIC"], &rows));
    writeln!(out, "selected p = {}\n", r.aic.selected).unwrap();

    writeln!(out, "OLS-CUSUM stability (boundary {})", crate::var::CUSUM_BOUNDARY_5PCT).unwrap();
    for s in &r.stability {
        for c in &s.equations {
            writeln!(out, "VAR({}) equation {}: sup|W| = {:.3}{}", s.p, r.names[c.equation], c.sup_abs, if c.crossed { "  CROSSED" } else { "" }).unwrap();
        }
    }
    writeln!(out, "{}\n", if r.stable { "stable" } else { "STABILITY CHECK FAILED" }).unwrap();

    writeln!(out, "Residual autocorrelation").unwrap();
    let rows: Vec<Vec<String>> = r
        .escalation
        .iter()
        .map(|d| {
            vec![
                d.p.to_string(),
                format!("{:.2}", d.portmanteau.statistic),
                d.portmanteau.df.to_string(),
                fmt_p(d.portmanteau.p_value),
                format!("{:.2}", d.breusch_godfrey.statistic),
                d.breusch_godfrey.df.to_string(),
                fmt_p(d.breusch_godfrey.p_value),
            ]
        })
        .collect();
    out.push_str(&table(&["Lags", "Portmanteau", "d.f.", "p-value", "Breusch-Godfrey", "d.f.", "p-value"], &rows));
    writeln!(out, "p = {}, augmented VAR order p + m = {}\n", r.p, r.augmented_order).unwrap();

    writeln!(out, "Wald tests of Granger causality").unwrap();
    let rows: Vec<Vec<String>> = r
        .wald
        .iter()
        .map(|w| vec![format!("{} -> {}", w.cause, w.effect), format!("{:.2}", w.chi_sq), w.df.to_string(), format!("{}{}", fmt_p(w.p_value), w.stars())])
        .collect();
    out.push_str(&table(&["Direction", "Chi-Sq", "d.f.", "p-value"], &rows));
    out.push_str("Note: *p<0.1; **p<0.05; ***p<0.01\n");
    out
}
