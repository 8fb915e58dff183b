//! Tokenisation and emotion-word counting.
//!
//! A token is a maximal run of alphabetic characters, optionally joined by
//! internal apostrophes (`don't`, `o’clock`), lowercased. Offsets are byte
//! offsets into the original text, and the character-window radius is
//! measured in bytes as well; for ASCII newswire the two coincide.
//!
//! Three proximity metrics are supported, see [`ScanMode`]. Negation
//! handling, when enabled, discards a hit if a cue word (default `not`)
//! occurs among the `k` tokens immediately before it.

use std::collections::BTreeMap;
use std::io::BufRead;

use chrono::NaiveDate;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::corpus::{Article, FilterSpec, RawArticle};
use crate::error::{Error, Result};
use crate::index::{DailyCounts, EmotionCounts};
use crate::lexicon::{Emotion, Lexicon};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

const RIGHT_SINGLE_QUOTE: char = '\u{2019}';

#[inline]
fn char_at(text: &str, pos: usize) -> Option<char> {
    let b = *text.as_bytes().get(pos)?;
    if b < 0x80 {
        Some(b as char)
    } else {
        text[pos..].chars().next()
    }
}

#[inline]
fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == RIGHT_SINGLE_QUOTE
}

/// Iterator over token byte spans.
#[derive(Debug, Clone)]
pub struct Spans<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Spans<'a> {
    pub fn new(text: &'a str) -> Self {
        Spans { text, pos: 0 }
    }
}

impl Iterator for Spans<'_> {
    type Item = (usize, usize);

    #[inline]
    fn next(&mut self) -> Option<(usize, usize)> {
        let bytes = self.text.as_bytes();
        let len = bytes.len();
        let mut pos = self.pos;

        // skip to the first alphabetic character
        loop {
            if pos >= len {
                self.pos = len;
                return None;
            }
            let b = bytes[pos];
            if b < 0x80 {
                if b.is_ascii_alphabetic() {
                    break;
                }
                pos += 1;
            } else {
                let c = char_at(self.text, pos).expect("char boundary");
                if c.is_alphabetic() {
                    break;
                }
                pos += c.len_utf8();
            }
        }

        let start = pos;
        loop {
            if pos >= len {
                break;
            }
            let b = bytes[pos];
            if b < 0x80 {
                if b.is_ascii_alphabetic() {
                    pos += 1;
                    continue;
                }
                if b == b'\'' && char_at(self.text, pos + 1).is_some_and(char::is_alphabetic) {
                    pos += 1;
                    continue;
                }
                break;
            }
            let c = char_at(self.text, pos).expect("char boundary");
            if c.is_alphabetic()
                || (c == RIGHT_SINGLE_QUOTE && char_at(self.text, pos + c.len_utf8()).is_some_and(char::is_alphabetic))
            {
                pos += c.len_utf8();
                continue;
            }
            break;
        }
        self.pos = pos;
        Some((start, pos))
    }
}

/// Writes the normalised (lowercased, apostrophe-unified) form of `span` into `buf`.
#[inline]
fn normalize_into(span: &str, buf: &mut String) {
    buf.clear();
    if span.is_ascii() {
        buf.push_str(span);
        buf.make_ascii_lowercase();
        return;
    }
    for c in span.chars() {
        if is_apostrophe(c) {
            buf.push('\'');
        } else {
            buf.extend(c.to_lowercase());
        }
    }
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut buf = String::new();
    Spans::new(text)
        .map(|(start, end)| {
            normalize_into(&text[start..end], &mut buf);
            Token { text: buf.clone(), start, end }
        })
        .collect()
}

/// Which emotion hits count toward an article's totals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ScanMode {
    /// Every hit in the article counts. With a concept, only articles
    /// containing the concept are analysed.
    WholeArticle { concept: Option<String> },
    /// Hits count only inside sentences that mention the concept.
    SameSentence { concept: String },
    /// Hits count only within `radius` bytes of some concept occurrence.
    CharWindow { concept: String, radius: usize },
}

impl ScanMode {
    pub fn whole_article() -> Self {
        ScanMode::WholeArticle { concept: None }
    }

    pub fn concept(&self) -> Option<&str> {
        match self {
            ScanMode::WholeArticle { concept } => concept.as_deref(),
            ScanMode::SameSentence { concept } | ScanMode::CharWindow { concept, .. } => Some(concept),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "negation")]
pub enum Negation {
    Off,
    Window { tokens: usize, cues: Vec<String> },
}

impl Negation {
    /// Window of `k` preceding tokens with the default cue list `{"not"}`.
    pub fn window(k: usize) -> Self {
        Negation::Window { tokens: k, cues: vec!["not".to_owned()] }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub mode: ScanMode,
    pub negation: Negation,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { mode: ScanMode::whole_article(), negation: Negation::Off }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(concept) = self.mode.concept() {
            let toks = tokenize(concept);
            if toks.len() != 1 || toks[0].text != concept {
                return Err(Error::InvalidInput(format!(
                    "concept '{concept}' must be a single lowercase word"
                )));
            }
        }
        if let ScanMode::CharWindow { radius: 0, .. } = self.mode {
            return Err(Error::InvalidInput("character window radius must be positive".into()));
        }
        if let Negation::Window { tokens, cues } = &self.negation {
            if *tokens == 0 {
                return Err(Error::InvalidInput("negation window must cover at least one token".into()));
            }
            if cues.is_empty() {
                return Err(Error::InvalidInput("negation cue list is empty".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ArticleCounts {
    pub excitement: u64,
    pub anxiety: u64,
    pub concept_present: bool,
}

#[derive(Debug, Clone, Copy)]
struct Hit {
    emotion: Emotion,
    start: usize,
    end: usize,
    sentence: u32,
}

/// Reusable per-thread scanning state.
pub struct ArticleScanner<'a> {
    lexicon: &'a Lexicon,
    config: &'a ScanConfig,
    buf: String,
    hits: Vec<Hit>,
    concept_spans: Vec<(usize, usize)>,
    concept_sentences: Vec<u32>,
}

impl<'a> ArticleScanner<'a> {
    pub fn new(lexicon: &'a Lexicon, config: &'a ScanConfig) -> Self {
        ArticleScanner {
            lexicon,
            config,
            buf: String::with_capacity(32),
            hits: Vec::new(),
            concept_spans: Vec::new(),
            concept_sentences: Vec::new(),
        }
    }

    pub fn scan(&mut self, text: &str) -> ArticleCounts {
        let concept = self.config.mode.concept();
        let (neg_window, cues): (usize, &[String]) = match &self.config.negation {
            Negation::Off => (0, &[]),
            Negation::Window { tokens, cues } => (*tokens, cues),
        };
        let track_sentences = matches!(self.config.mode, ScanMode::SameSentence { .. });

        // Fast path: plain whole-article counting without negation.
        if concept.is_none() && neg_window == 0 {
            let mut counts = ArticleCounts { concept_present: true, ..Default::default() };
            for (s, e) in Spans::new(text) {
                normalize_into(&text[s..e], &mut self.buf);
                match self.lexicon.classify(&self.buf) {
                    Some(Emotion::Excitement) => counts.excitement += 1,
                    Some(Emotion::Anxiety) => counts.anxiety += 1,
                    None => {}
                }
            }
            return counts;
        }

        self.hits.clear();
        self.concept_spans.clear();
        self.concept_sentences.clear();

        let mut last_cue: Option<usize> = None;
        let mut sentence: u32 = 0;
        let mut prev_end = 0usize;
        for (idx, (s, e)) in Spans::new(text).enumerate() {
            if track_sentences {
                sentence += count_sentence_breaks(&text[prev_end..s]);
            }
            prev_end = e;
            normalize_into(&text[s..e], &mut self.buf);
            let token = self.buf.as_str();

            if concept == Some(token) {
                self.concept_spans.push((s, e));
                self.concept_sentences.push(sentence);
            }
            if let Some(emotion) = self.lexicon.classify(token) {
                let negated = last_cue.is_some_and(|c| idx - c <= neg_window);
                if !negated {
                    self.hits.push(Hit { emotion, start: s, end: e, sentence });
                }
            }
            if neg_window > 0 && cues.iter().any(|c| c == token) {
                last_cue = Some(idx);
            }
        }

        let concept_present = concept.is_none() || !self.concept_spans.is_empty();
        let mut counts = ArticleCounts { concept_present, ..Default::default() };
        if !concept_present {
            return counts;
        }

        for hit in &self.hits {
            let counted = match &self.config.mode {
                ScanMode::WholeArticle { .. } => true,
                ScanMode::SameSentence { .. } => self.concept_sentences.binary_search(&hit.sentence).is_ok(),
                ScanMode::CharWindow { radius, .. } => {
                    nearest_gap(&self.concept_spans, hit.start, hit.end) <= *radius
                }
            };
            if counted {
                match hit.emotion {
                    Emotion::Excitement => counts.excitement += 1,
                    Emotion::Anxiety => counts.anxiety += 1,
                }
            }
        }
        counts
    }
}

/// Number of sentence terminators in a gap between two tokens: `.`, `!` or
/// `?` followed by whitespace. Runs such as `?!` or `...` followed by
/// whitespace count once, since only the last one is followed by whitespace.
fn count_sentence_breaks(gap: &str) -> u32 {
    if !gap.bytes().any(|b| matches!(b, b'.' | b'!' | b'?')) {
        return 0;
    }
    let mut n = 0;
    let mut chars = gap.chars().peekable();
    while let Some(c) = chars.next() {
        if matches!(c, '.' | '!' | '?') && chars.peek().is_some_and(|n| n.is_whitespace()) {
            n += 1;
        }
    }
    n
}

/// Smallest byte gap between `[start, end)` and any of the sorted `spans`.
fn nearest_gap(spans: &[(usize, usize)], start: usize, end: usize) -> usize {
    let gap = |&(cs, ce): &(usize, usize)| {
        if ce <= start {
            start - ce
        } else if cs >= end {
            cs - end
        } else {
            0
        }
    };
    // spans are disjoint and sorted, so both start and end offsets are monotone
    let idx = spans.partition_point(|&(cs, _)| cs < start);
    let mut best = usize::MAX;
    if idx < spans.len() {
        best = best.min(gap(&spans[idx]));
    }
    if idx > 0 {
        best = best.min(gap(&spans[idx - 1]));
    }
    best
}

pub fn scan_text(text: &str, lexicon: &Lexicon, config: &ScanConfig) -> ArticleCounts {
    ArticleScanner::new(lexicon, config).scan(text)
}

pub fn scan_article(article: &Article, lexicon: &Lexicon, config: &ScanConfig) -> ArticleCounts {
    scan_text(&article.text, lexicon, config)
}

/// Totals reported by a corpus scan.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ScanStats {
    pub lines: u64,
    pub kept: u64,
    pub dropped: u64,
    pub parse_errors: u64,
    /// The earliest few parse errors, by line number.
    pub error_samples: Vec<String>,
}

const MAX_ERROR_SAMPLES: usize = 10;

impl ScanStats {
    fn merge(mut self, other: ScanStats) -> ScanStats {
        self.lines += other.lines;
        self.kept += other.kept;
        self.dropped += other.dropped;
        self.parse_errors += other.parse_errors;
        self.error_samples.extend(other.error_samples);
        self.error_samples.sort_by_key(|s| sample_line(s));
        self.error_samples.truncate(MAX_ERROR_SAMPLES);
        self
    }

    fn record_error(&mut self, err: Error) {
        self.parse_errors += 1;
        if self.error_samples.len() < MAX_ERROR_SAMPLES {
            self.error_samples.push(err.to_string());
        }
    }
}

fn sample_line(s: &str) -> u64 {
    s.strip_prefix("line ")
        .and_then(|r| r.split(':').next())
        .and_then(|n| n.parse().ok())
        .unwrap_or(u64::MAX)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorpusScan {
    pub daily: DailyCounts,
    pub stats: ScanStats,
}

impl CorpusScan {
    fn merge(mut self, other: CorpusScan) -> CorpusScan {
        for (date, c) in other.daily {
            *self.daily.entry(date).or_default() += c;
        }
        self.stats = self.stats.merge(other.stats);
        self
    }
}

#[derive(Default)]
struct Partial {
    daily: FxHashMap<NaiveDate, EmotionCounts>,
    stats: ScanStats,
}

impl Partial {
    fn into_scan(self) -> CorpusScan {
        CorpusScan { daily: self.daily.into_iter().collect::<BTreeMap<_, _>>(), stats: self.stats }
    }
}

fn process_line(
    line: &[u8],
    line_no: u64,
    filter: &FilterSpec,
    scanner: &mut ArticleScanner<'_>,
    acc: &mut Partial,
) {
    acc.stats.lines += 1;
    let line = match std::str::from_utf8(line) {
        Ok(l) => l.trim_end_matches(['\n', '\r']),
        Err(e) => {
            acc.stats.record_error(Error::Parse { line: line_no, message: format!("invalid UTF-8: {e}") });
            return;
        }
    };
    let raw = match RawArticle::parse(line, line_no) {
        Ok(r) => r,
        Err(e) => return acc.stats.record_error(e),
    };
    let date = match raw.date(line_no) {
        Ok(d) => d,
        Err(e) => return acc.stats.record_error(e),
    };
    if !filter.keeps_parts(date, &raw.language, &raw.attribution, &raw.text, &raw.tags) {
        acc.stats.dropped += 1;
        return;
    }
    acc.stats.kept += 1;
    let counts = scanner.scan(&raw.text);
    let bucket = acc.daily.entry(date).or_default();
    bucket.add_article(counts);
}

/// One batch of raw lines read from the corpus.
#[derive(Default)]
struct Batch {
    data: Vec<u8>,
    lines: Vec<(usize, usize)>,
    first_line: u64,
}

const BATCH_BYTES: usize = 8 << 20;

fn read_batch<R: BufRead + ?Sized>(reader: &mut R, first_line: u64, batch: &mut Batch) -> Result<()> {
    batch.data.clear();
    batch.lines.clear();
    batch.first_line = first_line;
    while batch.data.len() < BATCH_BYTES {
        let start = batch.data.len();
        let n = reader
            .read_until(b'\n', &mut batch.data)
            .map_err(|e| Error::io("<corpus>", e))?;
        if n == 0 {
            break;
        }
        batch.lines.push((start, start + n));
    }
    Ok(())
}

fn scan_batch(batch: &Batch, filter: &FilterSpec, lexicon: &Lexicon, config: &ScanConfig) -> CorpusScan {
    use rayon::prelude::*;

    const CHUNK: usize = 256;
    batch
        .lines
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(ci, chunk)| {
            let mut scanner = ArticleScanner::new(lexicon, config);
            let mut acc = Partial::default();
            let base = batch.first_line + (ci * CHUNK) as u64;
            for (i, &(s, e)) in chunk.iter().enumerate() {
                process_line(&batch.data[s..e], base + i as u64, filter, &mut scanner, &mut acc);
            }
            acc.into_scan()
        })
        .reduce(CorpusScan::default, CorpusScan::merge)
}

/// Streams a corpus once, filtering and scanning articles in parallel.
///
/// A date bucket exists for every date with at least one kept article. In
/// concept modes `n_articles` counts only articles containing the concept,
/// so such a bucket may hold zero articles. Parse errors are counted, never
/// fatal; I/O errors are.
///
/// `threads = 0` uses the global rayon pool.
pub fn scan_corpus<R: BufRead + Send + ?Sized>(
    reader: &mut R,
    filter: &FilterSpec,
    lexicon: &Lexicon,
    config: &ScanConfig,
    threads: usize,
) -> Result<CorpusScan> {
    config.validate()?;
    filter.validate()?;

    let run = |reader: &mut R| -> Result<CorpusScan> {
        let mut total = CorpusScan::default();
        let mut current = Batch::default();
        let mut next = Batch::default();
        read_batch(reader, 1, &mut current)?;
        while !current.lines.is_empty() {
            let next_first = current.first_line + current.lines.len() as u64;
            let (scanned, read) = rayon::join(
                || scan_batch(&current, filter, lexicon, config),
                || read_batch(reader, next_first, &mut next),
            );
            read?;
            total = total.merge(scanned);
            std::mem::swap(&mut current, &mut next);
        }
        Ok(total)
    };

    if threads == 0 {
        run(reader)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Failed(format!("thread pool: {e}")))?;
        pool.install(|| run(reader))
    }
}

/// Scans already-parsed articles (no parse errors possible).
pub fn scan_articles<'a, I>(articles: I, filter: &FilterSpec, lexicon: &Lexicon, config: &ScanConfig) -> CorpusScan
where
    I: IntoIterator<Item = &'a Article>,
{
    let mut scanner = ArticleScanner::new(lexicon, config);
    let mut acc = Partial::default();
    for a in articles {
        acc.stats.lines += 1;
        if !filter.keeps(a) {
            acc.stats.dropped += 1;
            continue;
        }
        acc.stats.kept += 1;
        let counts = scanner.scan(&a.text);
        acc.daily.entry(a.date).or_default().add_article(counts);
    }
    acc.into_scan()
}
