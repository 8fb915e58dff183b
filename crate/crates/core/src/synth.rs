//! Deterministic synthetic news archives for tests, benchmarks and examples.
//!
//! Articles mix neutral filler with emotion words, a concept word, negation
//! cues, abbreviations, decimals and both straight and curly apostrophes, so
//! every scanner mode has something to find.

use std::io::Write;

use chrono::{Duration, NaiveDate};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Article;
use crate::lexicon::Lexicon;

pub const EXCITEMENT_WORDS: &[&str] = &[
    "thrilled", "eager", "confident", "delighted", "excited", "optimistic", "upbeat", "enthusiastic", "buoyant",
    "cheerful", "hopeful", "elated", "energized", "inspired", "keen", "triumphant", "jubilant", "bold", "glad", "proud",
];

pub const ANXIETY_WORDS: &[&str] = &[
    "worried", "nervous", "afraid", "anxious", "fearful", "uneasy", "panicked", "distressed", "scared", "jittery",
    "tense", "alarmed", "troubled", "dread", "doubtful", "uncertain", "threatened", "shaken", "apprehensive", "concerned",
];

const FILLER: &[&str] = &[
    "the", "market", "said", "traders", "on", "a", "in", "of", "shares", "bank", "officials", "prices", "week",
    "analysts", "and", "to", "company", "report", "would", "its", "year", "central", "policy", "rates", "investors",
    "government", "quarter", "it's", "don't", "isn’t", "firm's", "O'Neill", "demand", "supply", "growth", "credit",
    "funding", "late", "early", "trading", "New", "York", "exchange", "index", "bond", "yields", "oil", "dollar",
    "euro", "sterling", "stocks", "futures", "deal", "merger", "profit", "loss", "revenue", "outlook", "data",
    "sector", "energy", "retail", "housing", "jobs", "payrolls", "Fed", "ECB", "minister", "talks", "budget",
];

const CONCEPT: &str = "liquidity";

/// The emotion lists used by the generator.
pub fn lexicon() -> Lexicon {
    Lexicon::new(EXCITEMENT_WORDS.iter().copied(), ANXIETY_WORDS.iter().copied()).expect("built-in lists are valid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub articles: usize,
    pub seed: u64,
    /// Target mean article text length in bytes.
    pub mean_bytes: usize,
    pub start: NaiveDate,
    pub days: i64,
    /// Emit an unparseable line after every this many articles.
    pub malformed_every: Option<usize>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            articles: 1000,
            seed: 1,
            mean_bytes: 2000,
            start: NaiveDate::from_ymd_opt(1996, 1, 1).expect("valid date"),
            days: 365 * 4,
            malformed_every: None,
        }
    }
}

const DATELINES: &[&str] = &["NEW YORK (Reuters) - ", "WASHINGTON (Reuters) - ", "LONDON (Reuters) - ", "TOKYO (Reuters) - ", ""];
const TAGS: &[&str] = &["BUS", "MKT", "POL", "SPO", "ODD", "WEA"];

fn word(rng: &mut ChaCha8Rng) -> &'static str {
    let r: f64 = rng.random();
    let pool = if r < 0.05 {
        EXCITEMENT_WORDS
    } else if r < 0.10 {
        ANXIETY_WORDS
    } else if r < 0.115 {
        return CONCEPT;
    } else if r < 0.13 {
        return "not";
    } else {
        FILLER
    };
    pool.choose(rng).expect("non-empty pool")
}

fn text(rng: &mut ChaCha8Rng, mean_bytes: usize) -> String {
    let target = rng.random_range(mean_bytes / 2..=mean_bytes * 3 / 2);
    let mut out = String::with_capacity(target + 64);
    out.push_str(DATELINES.choose(rng).expect("non-empty"));
    while out.len() < target {
        let words = rng.random_range(6..20);
        for i in 0..words {
            if i > 0 {
                out.push(if rng.random_bool(0.05) { '\n' } else { ' ' });
            }
            let w = word(rng);
            if i == 0 || rng.random_bool(0.03) {
                let mut cs = w.chars();
                if let Some(c) = cs.next() {
                    out.extend(c.to_uppercase());
                    out.push_str(cs.as_str());
                }
            } else {
                out.push_str(w);
            }
            match rng.random_range(0..40) {
                0 => out.push_str(" 3.5%"),
                1 => out.push_str(" U.S."),
                2 => out.push(','),
                3 => out.push_str("-based"),
                _ => {}
            }
        }
        out.push_str([". ", ". ", ". ", "! ", "? ", ".\n", ".\" "][rng.random_range(0..7)]);
    }
    out.truncate(out.trim_end().len());
    out
}

/// Generates the archive described by `cfg`.
pub fn articles(cfg: &SynthConfig) -> Vec<Article> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.articles)
        .map(|_| {
            let date = cfg.start + Duration::days(rng.random_range(0..cfg.days.max(1)));
            let attribution = if rng.random_bool(0.85) { "Reuters" } else { "AP" };
            let language = if rng.random_bool(0.9) { "en" } else { "de" };
            let n_tags = rng.random_range(0..3);
            let tags = (0..n_tags).map(|_| TAGS.choose(&mut rng).expect("non-empty").to_string()).collect();
            let text = text(&mut rng, cfg.mean_bytes);
            Article { date, language: language.into(), text, attribution: attribution.into(), tags }
        })
        .collect()
}

/// Writes the archive as JSON lines, interleaving malformed lines if requested.
pub fn write_corpus(cfg: &SynthConfig, mut w: impl Write) -> std::io::Result<()> {
    for (i, a) in articles(cfg).iter().enumerate() {
        serde_json::to_writer(&mut w, a)?;
        w.write_all(b"\n")?;
        if cfg.malformed_every.is_some_and(|k| k > 0 && (i + 1) % k == 0) {
            w.write_all(b"{\"date\": \"not a date\", \"text\": \n")?;
        }
    }
    Ok(())
}

pub fn corpus_bytes(cfg: &SynthConfig) -> Vec<u8> {
    let mut out = Vec::with_capacity(cfg.articles * (cfg.mean_bytes + 200));
    write_corpus(cfg, &mut out).expect("writing to memory");
    out
}
