//! Command-line front end: index building, statistics reports, self-test.
//!
//! Exit codes: 0 success, 2 usage error, 3 invalid input, 4 numerical
//! failure, 5 degenerate data.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sentiment_shift::config::RunConfig;
use sentiment_shift::corpus::{open_corpus, FilterSpec};
use sentiment_shift::granger::{self, GrangerConfig};
use sentiment_shift::index::{IndexTable, Series};
use sentiment_shift::lexicon::Lexicon;
use sentiment_shift::montecarlo::{self, SuiteSize};
use sentiment_shift::period::{Frequency, Period};
use sentiment_shift::regress::{self, AugmentationNames};
use sentiment_shift::scanner::{self, Negation, ScanConfig, ScanMode};
use sentiment_shift::stationarity::{self, Deterministic};
use sentiment_shift::var::DiagnosticSettings;
use sentiment_shift::{report, Error, ErrorKind, Result};

#[derive(Parser)]
#[command(name = "rss", version, about = "Relative sentiment shift index and causality tooling")]
struct Cli {
    /// Worker threads for corpus scanning and simulations (0 = all cores).
    #[arg(long, global = true, env = "RSS_THREADS", default_value_t = 0)]
    threads: usize,
    /// TOML configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a news corpus.
    #[command(subcommand)]
    Index(IndexCommand),
    /// Statistical tests on series CSV files.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Simulation checks of the statistical procedures.
    #[command(subcommand)]
    Selftest(SelftestCommand),
}

#[derive(Subcommand)]
enum IndexCommand {
    /// General index from every emotion hit in each kept article.
    Build(IndexArgs),
    /// Concept-focused index.
    Focus(FocusArgs),
}

#[derive(Args)]
struct IndexArgs {
    /// JSON-lines corpus (.gz accepted).
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    excitement: Option<PathBuf>,
    #[arg(long)]
    anxiety: Option<PathBuf>,
    /// Filter preset: us or uk.
    #[arg(long)]
    preset: Option<String>,
    /// daily, monthly or quarterly.
    #[arg(long)]
    freq: Option<String>,
    /// First date kept (YYYY-MM-DD or YYYY-MM).
    #[arg(long)]
    from: Option<String>,
    /// Last date kept (YYYY-MM-DD or YYYY-MM).
    #[arg(long)]
    to: Option<String>,
    /// Discard hits preceded by a negation cue within this many tokens.
    #[arg(long)]
    negation: Option<usize>,
    /// Index CSV output.
    #[arg(long, default_value = "index.csv")]
    out: PathBuf,
    /// Run summary output (defaults to the index path with `.summary.json`).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct FocusArgs {
    #[command(flatten)]
    common: IndexArgs,
    #[arg(long)]
    concept: Option<String>,
    /// Count hits within this many bytes of the concept.
    #[arg(long, conflicts_with = "sentence")]
    window: Option<usize>,
    /// Count hits in sentences mentioning the concept.
    #[arg(long)]
    sentence: bool,
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Augmented Dickey-Fuller unit-root test.
    Adf(UnitRootArgs),
    /// KPSS stationarity test.
    Kpss(UnitRootArgs),
    /// Toda-Yamamoto Granger causality between two series.
    Granger(GrangerArgs),
    /// Forecast-augmentation regressions.
    Regress(RegressArgs),
}

#[derive(Args)]
struct UnitRootArgs {
    #[arg(long)]
    series: PathBuf,
    /// Lagged differences (ADF) or truncation lag (KPSS).
    #[arg(long)]
    lags: Option<usize>,
    /// constant or constant+trend.
    #[arg(long)]
    det: Option<String>,
    /// Replication preset: ADF with 6 lags, constant and trend; KPSS with lag 3 and a level.
    #[arg(long)]
    replication: bool,
    /// Difference the series this many times first.
    #[arg(long, default_value_t = 0)]
    diff: usize,
    /// JSON result output (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GrangerArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long, default_value = "x")]
    x_name: String,
    #[arg(long, default_value = "y")]
    y_name: String,
    #[arg(long)]
    p_max: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    /// Directory for report.txt, report.json, aic.csv and CUSUM CSVs.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RegressArgs {
    #[arg(long)]
    actual: PathBuf,
    #[arg(long)]
    forecast: PathBuf,
    #[arg(long)]
    extra: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    lag_extra: usize,
    /// Lag applied to the forecast (0 when it is already labelled by target period).
    #[arg(long, default_value_t = 0)]
    lag_forecast: usize,
    #[arg(long, default_value = "SPF")]
    forecast_name: String,
    #[arg(long, default_value = "RSS")]
    extra_name: String,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum SelftestCommand {
    /// Size and power simulations with a master seed.
    Montecarlo(MonteCarloArgs),
}

#[derive(Args)]
struct MonteCarloArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// One tenth of the default replications.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Input => 3,
                ErrorKind::Numerical => 4,
                ErrorKind::Degenerate => 5,
            })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let file_cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.threads > 0 {
        // the global pool can only be configured once; ignore a second attempt
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match cli.command {
        Command::Index(IndexCommand::Build(args)) => cmd_index(&args, None, &file_cfg, cli.threads),
        Command::Index(IndexCommand::Focus(args)) => cmd_index(&args.common, Some(&args), &file_cfg, cli.threads),
        Command::Stats(StatsCommand::Adf(args)) => cmd_unit_root(&args, true, &file_cfg),
        Command::Stats(StatsCommand::Kpss(args)) => cmd_unit_root(&args, false, &file_cfg),
        Command::Stats(StatsCommand::Granger(args)) => cmd_granger(&args, &file_cfg),
        Command::Stats(StatsCommand::Regress(args)) => cmd_regress(&args),
        Command::Selftest(SelftestCommand::Montecarlo(args)) => cmd_montecarlo(&args, &file_cfg),
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// `YYYY-MM-DD`, `YYYY-MM` or `YYYY-Qn`; `end` picks the last day of a month or quarter.
fn parse_bound(s: &str, end: bool) -> Result<NaiveDate> {
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d);
    }
    let p: Period = s.parse()?;
    Ok(if end { p.next().first_day().pred_opt().expect("valid date") } else { p.first_day() })
}

fn parse_range(from: Option<&str>, to: Option<&str>) -> Result<(Option<NaiveDate>, Option<NaiveDate>)> {
    Ok((from.map(|s| parse_bound(s, false)).transpose()?, to.map(|s| parse_bound(s, true)).transpose()?))
}

#[derive(Serialize)]
struct EffectiveIndexConfig<'a> {
    corpus: &'a Path,
    excitement: &'a Path,
    anxiety: &'a Path,
    freq: Frequency,
    filter: &'a FilterSpec,
    scan: &'a ScanConfig,
    threads: usize,
}

#[derive(Serialize)]
struct RunSummary<'a> {
    command: &'a str,
    started: String,
    finished: String,
    wall_seconds: f64,
    articles_per_second: f64,
    stats: &'a scanner::ScanStats,
    periods: usize,
    normalization_note: Option<&'a str>,
    output: &'a Path,
    config: EffectiveIndexConfig<'a>,
}

fn cmd_index(args: &IndexArgs, focus: Option<&FocusArgs>, file_cfg: &RunConfig, threads: usize) -> Result<()> {
    let ic = &file_cfg.index;
    let preset = args.preset.clone().or_else(|| ic.preset.clone()).unwrap_or_else(|| "us".into());
    let mut filter = file_cfg.filter.apply(FilterSpec::preset(&preset)?);
    let (from, to) = parse_range(
        args.from.as_deref().or(ic.from.as_deref()),
        args.to.as_deref().or(ic.to.as_deref()),
    )?;
    filter.date_from = from;
    filter.date_to = to;

    let freq: Frequency = args.freq.clone().or_else(|| ic.freq.clone()).unwrap_or_else(|| "monthly".into()).parse()?;
    let excitement = args.excitement.clone().or_else(|| ic.excitement.clone())
        .ok_or_else(|| Error::InvalidInput("--excitement lexicon path is required".into()))?;
    let anxiety = args.anxiety.clone().or_else(|| ic.anxiety.clone())
        .ok_or_else(|| Error::InvalidInput("--anxiety lexicon path is required".into()))?;

    let mode = match focus {
        None => ScanMode::whole_article(),
        Some(f) => {
            let concept = f.concept.clone().or_else(|| ic.concept.clone())
                .ok_or_else(|| Error::InvalidInput("--concept is required for index focus".into()))?;
            match (f.sentence, f.window.or(ic.window)) {
                (true, _) => ScanMode::SameSentence { concept },
                (false, Some(radius)) => ScanMode::CharWindow { concept, radius },
                (false, None) => ScanMode::WholeArticle { concept: Some(concept) },
            }
        }
    };
    let negation = match args.negation.or(ic.negation) {
        None | Some(0) => Negation::Off,
        Some(k) => match &ic.negation_cues {
            Some(cues) => Negation::Window { tokens: k, cues: cues.clone() },
            None => Negation::window(k),
        },
    };
    let scan_cfg = ScanConfig { mode, negation };

    if !args.corpus.exists() {
        return Err(Error::io(&args.corpus, std::io::Error::from(std::io::ErrorKind::NotFound)));
    }
    let lexicon = Lexicon::load(&excitement, &anxiety)?;

    let started = chrono::Utc::now();
    let clock = Instant::now();
    let mut reader = open_corpus(&args.corpus)?;
    let scan = scanner::scan_corpus(&mut reader, &filter, &lexicon, &scan_cfg, threads)?;
    let wall = clock.elapsed().as_secs_f64();
    if scan.stats.kept == 0 {
        return Err(Error::NoArticles);
    }
    let table = IndexTable::build(&scan.daily, freq)?;
    write(&args.out, &table.to_csv())?;

    let summary_path = args.summary.clone().unwrap_or_else(|| args.out.with_extension("summary.json"));
    let summary = RunSummary {
        command: if focus.is_some() { "index focus" } else { "index build" },
        started: started.to_rfc3339(),
        finished: chrono::Utc::now().to_rfc3339(),
        wall_seconds: wall,
        articles_per_second: if wall > 0.0 { scan.stats.lines as f64 / wall } else { 0.0 },
        stats: &scan.stats,
        periods: table.rows.len(),
        normalization_note: table.normalization_note.as_deref(),
        output: &args.out,
        config: EffectiveIndexConfig {
            corpus: &args.corpus,
            excitement: &excitement,
            anxiety: &anxiety,
            freq,
            filter: &filter,
            scan: &scan_cfg,
            threads,
        },
    };
    write(&summary_path, &to_json(&summary))?;
    if let Some(note) = &table.normalization_note {
        eprintln!("warning: {note}");
    }
    eprintln!(
        "{} lines, {} kept, {} dropped, {} parse errors; {} periods written to {}",
        scan.stats.lines,
        scan.stats.kept,
        scan.stats.dropped,
        scan.stats.parse_errors,
        table.rows.len(),
        args.out.display()
    );
    Ok(())
}

fn load_series(path: &Path, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<Series> {
    let s = Series::load_csv(path)?;
    Ok(if from.is_some() || to.is_some() { s.restrict(from, to) } else { s })
}

fn cmd_unit_root(args: &UnitRootArgs, adf: bool, file_cfg: &RunConfig) -> Result<()> {
    let st = &file_cfg.stats;
    let (preset_lags, preset_det) = match (args.replication, adf) {
        (true, true) => (Some(6), Some(Deterministic::ConstantTrend)),
        (true, false) => (Some(3), Some(Deterministic::Constant)),
        (false, _) => (None, None),
    };
    let file_lags = if adf { st.adf_lags } else { st.kpss_lag };
    let lags = args.lags.or(st.lags).or(file_lags).or(preset_lags)
        .ok_or_else(|| Error::InvalidInput("--lags is required (or use --replication)".into()))?;
    let det = match args.det.as_deref().or(st.det.as_deref()) {
        Some(d) => d.parse()?,
        None => preset_det.unwrap_or(Deterministic::Constant),
    };
    let mut s = Series::load_csv(&args.series)?;
    if args.diff > 0 {
        s = sentiment_shift::timeseries::difference(&s, args.diff)?;
    }
    let r = if adf { stationarity::adf_test(&s, lags, det)? } else { stationarity::kpss_test(&s, lags, det)? };
    let json = to_json(&r);
    match &args.out {
        Some(p) => {
            write(p, &json)?;
            print!("{}", report::single_test(&r));
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn cmd_granger(args: &GrangerArgs, file_cfg: &RunConfig) -> Result<()> {
    let st = &file_cfg.stats;
    let (from, to) = parse_range(args.from.as_deref(), args.to.as_deref())?;
    let x = load_series(&args.x, from, to)?;
    let y = load_series(&args.y, from, to)?;

    let mut cfg = GrangerConfig::default();
    cfg.p_max = args.p_max.or(st.p_max).unwrap_or(cfg.p_max);
    cfg.alpha = args.alpha.or(st.alpha).unwrap_or(cfg.alpha);
    cfg.order.alpha = cfg.alpha;
    cfg.order.max_order = st.max_order.unwrap_or(cfg.order.max_order);
    cfg.order.adf_lags = st.adf_lags.unwrap_or(cfg.order.adf_lags);
    cfg.order.kpss_lag = st.kpss_lag.unwrap_or(cfg.order.kpss_lag);
    if let Some(d) = &st.det {
        cfg.order.adf_det = d.parse()?;
    }
    cfg.diagnostics = DiagnosticSettings {
        portmanteau_lags: st.portmanteau_lags,
        bg_lags: st.bg_lags.unwrap_or(cfg.diagnostics.bg_lags),
        alpha: cfg.alpha,
    };

    let r = granger::toda_yamamoto(&x, &y, [&args.x_name, &args.y_name], &cfg)?;
    let text = report::granger_text(&r);
    let dir = &args.out_dir;
    write(&dir.join("report.txt"), &text)?;
    #[derive(Serialize)]
    struct Out<'a> {
        config: &'a GrangerConfig,
        report: &'a granger::GrangerReport,
    }
    write(&dir.join("report.json"), &to_json(&Out { config: &cfg, report: &r }))?;
    let mut aic = String::from("p,aic\n");
    for row in &r.aic.table {
        aic.push_str(&format!("{},{}\n", row.p, row.aic));
    }
    write(&dir.join("aic.csv"), &aic)?;
    for s in &r.stability {
        for c in &s.equations {
            write(&dir.join(format!("cusum_p{}_{}.csv", s.p, r.names[c.equation])), &c.to_csv())?;
        }
    }
    print!("{text}");
    Ok(())
}

fn cmd_regress(args: &RegressArgs) -> Result<()> {
    let (from, to) = parse_range(args.from.as_deref(), args.to.as_deref())?;
    let actual = load_series(&args.actual, from, to)?;
    let forecast = Series::load_csv(&args.forecast)?;
    let names = AugmentationNames { forecast: args.forecast_name.clone(), extra: args.extra_name.clone() };
    let (text, json) = match &args.extra {
        Some(extra_path) => {
            let extra = Series::load_csv(extra_path)?;
            let study = regress::augmentation_study(&actual, &forecast, &extra, args.lag_extra, args.lag_forecast, &names)?;
            let mut text = report::regression_table(&["(1)", "(2)"], &[&study.restricted, &study.augmented]);
            text.push_str(&format!(
                "Sample {} to {}; adjusted R2 gain ratio {:.3}\n",
                study.periods[0],
                study.periods[study.periods.len() - 1],
                study.adj_r_squared_gain_ratio
            ));
            (text, to_json(&study))
        }
        None => {
            let f = if args.lag_forecast > 0 {
                sentiment_shift::timeseries::lag(&forecast, args.lag_forecast)?
            } else {
                forecast
            };
            let a = sentiment_shift::timeseries::align(&[&actual, &f])?;
            let fit = regress::ols_fit(&a.columns[0], &[(names.forecast.as_str(), &a.columns[1])])?;
            let mut text = report::regression_table(&["(1)"], &[&fit]);
            text.push_str(&format!("Sample {} to {}\n", a.periods[0], a.periods[a.n_rows() - 1]));
            (text, to_json(&fit))
        }
    };
    write(&args.out_dir.join("regress.txt"), &text)?;
    write(&args.out_dir.join("regress.json"), &json)?;
    print!("{text}");
    Ok(())
}

fn cmd_montecarlo(args: &MonteCarloArgs, file_cfg: &RunConfig) -> Result<()> {
    let seed = args.seed.or(file_cfg.stats.seed).unwrap_or(20150101);
    let mut size = SuiteSize::default();
    if args.quick {
        size = SuiteSize {
            unit_root: size.unit_root / 10,
            order: size.order / 10,
            aic: size.aic / 10,
            diagnostics: size.diagnostics / 10,
            cusum: size.cusum / 10,
            granger: size.granger / 10,
        };
    }
    let checks = montecarlo::suite(seed, size)?;
    let mut text = format!("Monte Carlo self-test, master seed {seed}\n");
    for c in &checks {
        text.push_str(&format!(
            "{}  {:<60} {:>8.4}  (want {}, {} replications)\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.band,
            c.replications
        ));
    }
    if let Some(out) = &args.out {
        #[derive(Serialize)]
        struct Out<'a> {
            seed: u64,
            size: SuiteSize,
            checks: &'a [montecarlo::CheckResult],
        }
        write(out, &to_json(&Out { seed, size, checks: &checks }))?;
    }
    print!("{text}");
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(Error::Failed(format!("{failed} of {} checks outside their bands", checks.len())));
    }
    Ok(())
}
