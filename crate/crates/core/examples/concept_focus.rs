//! Concept-focused indexes: the same archive under each proximity metric,
//! with and without negation handling.
//!
//! ```bash
//! cargo run --release --example concept_focus
//! ```

use sentiment_shift::corpus::FilterSpec;
use sentiment_shift::index::IndexTable;
use sentiment_shift::period::Frequency;
use sentiment_shift::scanner::{self, Negation, ScanConfig, ScanMode};
use sentiment_shift::synth::{self, SynthConfig};

fn main() -> sentiment_shift::Result<()> {
    let articles = synth::articles(&SynthConfig { articles: 8000, seed: 7, ..Default::default() });
    let lexicon = synth::lexicon();

    // a single article, scored every way
    let text = "Traders were not confident. Liquidity dried up and dealers were worried, \
                though some were bold. Elsewhere, officials were upbeat about growth.";
    let concept = || "liquidity".to_owned();
    let modes = [
        ("whole article", ScanMode::whole_article()),
        ("articles with the concept", ScanMode::WholeArticle { concept: Some(concept()) }),
        ("same sentence", ScanMode::SameSentence { concept: concept() }),
        ("within 40 bytes", ScanMode::CharWindow { concept: concept(), radius: 40 }),
    ];
    println!("{text}\n");
    for (label, mode) in &modes {
        for negation in [Negation::Off, Negation::window(3)] {
            let cfg = ScanConfig { mode: mode.clone(), negation: negation.clone() };
            let c = scanner::scan_text(text, &lexicon, &cfg);
            let neg = if negation == Negation::Off { "" } else { ", negation 3" };
            println!("  {:<40} excitement {}  anxiety {}", format!("{label}{neg}"), c.excitement, c.anxiety);
        }
    }

    // the whole archive: in concept modes only articles mentioning the
    // concept count toward n_articles
    println!("\nmonthly averages over the archive:");
    for (label, mode) in modes {
        let cfg = ScanConfig { mode, negation: Negation::window(3) };
        let scan = scanner::scan_articles(&articles, &FilterSpec::us(), &lexicon, &cfg);
        let table = IndexTable::build(&scan.daily, Frequency::Monthly)?;
        let n: u64 = table.rows.iter().map(|r| r.counts.n_articles).sum();
        let hits: u64 = table.rows.iter().map(|r| r.counts.excitement + r.counts.anxiety).sum();
        println!("  {label:<26} {n:>5} articles  {:>6.2} hits per article", hits as f64 / n as f64);
    }
    Ok(())
}
