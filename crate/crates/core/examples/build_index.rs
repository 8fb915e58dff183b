//! Builds a monthly and a quarterly RSS index from a synthetic news archive.
//!
//! ```bash
//! cargo run --release --example build_index
//! ```

use std::io::Cursor;

use sentiment_shift::corpus::FilterSpec;
use sentiment_shift::index::IndexTable;
use sentiment_shift::period::Frequency;
use sentiment_shift::scanner::{self, ScanConfig};
use sentiment_shift::synth::{self, SynthConfig};

fn main() -> sentiment_shift::Result<()> {
    // 20k articles as JSON lines, with a malformed line every 1000
    let cfg = SynthConfig { articles: 20_000, seed: 42, malformed_every: Some(1000), ..Default::default() };
    let corpus = synth::corpus_bytes(&cfg);
    let lexicon = synth::lexicon();

    // US preset: Reuters, English, New York or Washington dateline, no sport/odd/weather tags
    let filter = FilterSpec::us();
    let scan = scanner::scan_corpus(&mut Cursor::new(&corpus), &filter, &lexicon, &ScanConfig::default(), 0)?;
    println!(
        "{} lines: {} kept, {} dropped, {} parse errors",
        scan.stats.lines, scan.stats.kept, scan.stats.dropped, scan.stats.parse_errors
    );
    if let Some(first) = scan.stats.error_samples.first() {
        println!("first parse error: {first}");
    }

    let monthly = IndexTable::build(&scan.daily, Frequency::Monthly)?;
    println!("\nmonthly index, first 6 of {} rows:", monthly.rows.len());
    for line in monthly.to_csv().lines().take(7) {
        println!("  {line}");
    }

    // quarters are one collection each: counts are summed before dividing
    let quarterly = IndexTable::build(&scan.daily, Frequency::Quarterly)?;
    println!("\nquarterly index:");
    for row in &quarterly.rows {
        println!("  {}  rss {:>7.4}  n {}", row.period, row.rss_raw.unwrap_or(f64::NAN), row.counts.n_articles);
    }

    // the UK preset keeps London datelines instead
    let uk = scanner::scan_corpus(&mut Cursor::new(&corpus), &FilterSpec::uk(), &lexicon, &ScanConfig::default(), 0)?;
    println!("\nUK preset keeps {} articles", uk.stats.kept);
    Ok(())
}
