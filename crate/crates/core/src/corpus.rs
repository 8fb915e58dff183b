//! Article ingestion and inclusion filters.
//!
//! The corpus format is UTF-8 JSON lines, one article per line, with the
//! fields `date` (`YYYY-MM-DD`), `language`, `text`, `attribution` and
//! `tags` (a comma-separated string or an array of strings). Unknown fields
//! are ignored. Files ending in `.gz` are decompressed transparently.

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::NaiveDate;
use flate2::read::MultiGzDecoder;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Article {
    pub date: NaiveDate,
    pub language: String,
    pub text: String,
    pub attribution: String,
    pub tags: Vec<String>,
}

/// Zero-copy view of one corpus line; strings borrow from the line unless
/// they contain JSON escapes.
#[derive(Debug, Deserialize)]
pub(crate) struct RawArticle<'a> {
    #[serde(borrow)]
    pub date: Cow<'a, str>,
    #[serde(borrow)]
    pub language: Cow<'a, str>,
    #[serde(borrow)]
    pub text: Cow<'a, str>,
    #[serde(borrow)]
    pub attribution: Cow<'a, str>,
    #[serde(deserialize_with = "deserialize_tags")]
    pub tags: Vec<String>,
}

impl RawArticle<'_> {
    pub(crate) fn parse(line: &str, line_no: u64) -> Result<RawArticle<'_>> {
        serde_json::from_str(line).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })
    }

    pub(crate) fn date(&self, line_no: u64) -> Result<NaiveDate> {
        parse_date(&self.date).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("invalid date '{}'", self.date),
        })
    }
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    let head = match s.as_bytes().get(10) {
        None => s,
        Some(b'T' | b' ') => &s[..10],
        Some(_) => return None,
    };
    NaiveDate::parse_from_str(head, "%Y-%m-%d").ok()
}

fn deserialize_tags<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Vec<String>, D::Error> {
    struct TagsVisitor;

    impl<'de> Visitor<'de> for TagsVisitor {
        type Value = Vec<String>;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a comma-separated string or an array of tag strings")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
            Ok(v.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::to_ascii_uppercase).collect())
        }

        fn visit_unit<E: de::Error>(self) -> std::result::Result<Self::Value, E> {
            Ok(Vec::new())
        }

        fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
            let mut tags = Vec::new();
            while let Some(t) = seq.next_element::<Cow<'de, str>>()? {
                let t = t.trim();
                if !t.is_empty() {
                    tags.push(t.to_ascii_uppercase());
                }
            }
            Ok(tags)
        }
    }

    deserializer.deserialize_any(TagsVisitor)
}

/// Parses one corpus line. `line_no` is 1-based and is carried in the error.
pub fn parse_article(record: &str, line_no: u64) -> Result<Article> {
    let raw = RawArticle::parse(record, line_no)?;
    let date = raw.date(line_no)?;
    Ok(Article {
        date,
        language: raw.language.into_owned(),
        text: raw.text.into_owned(),
        attribution: raw.attribution.into_owned(),
        tags: raw.tags,
    })
}

/// Inclusion rules for articles. An empty `dateline_allow` list means "no
/// dateline restriction"; `None` date bounds are open.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub required_attribution: String,
    pub required_language: String,
    pub dateline_allow: Vec<String>,
    pub dateline_deny: Vec<String>,
    pub excluded_tags: BTreeSet<String>,
    pub date_from: Option<NaiveDate>,
    pub date_to: Option<NaiveDate>,
}

impl FilterSpec {
    /// US-focused Reuters news: New York and Washington datelines.
    pub fn us() -> Self {
        FilterSpec {
            required_attribution: "Reuters".into(),
            required_language: "en".into(),
            dateline_allow: vec!["NEW YORK".into(), "WASHINGTON".into()],
            dateline_deny: vec!["LONDON".into()],
            excluded_tags: ["SPO", "ODD", "WEA"].into_iter().map(String::from).collect(),
            date_from: None,
            date_to: None,
        }
    }

    /// UK-focused Reuters news: London datelines.
    pub fn uk() -> Self {
        FilterSpec {
            dateline_allow: vec!["LONDON".into()],
            dateline_deny: vec!["NEW YORK".into(), "WASHINGTON".into()],
            ..FilterSpec::us()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "us" => Ok(FilterSpec::us()),
            "uk" => Ok(FilterSpec::uk()),
            _ => Err(Error::InvalidInput(format!("unknown filter preset '{name}' (expected us or uk)"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.excluded_tags.iter().find(|t| t.to_ascii_uppercase() != **t) {
            return Err(Error::InvalidInput(format!("excluded tag '{t}' must be uppercase")));
        }
        if let Some(p) = self.dateline_allow.iter().find(|p| self.dateline_deny.contains(p)) {
            return Err(Error::InvalidInput(format!("dateline '{p}' is both allowed and denied")));
        }
        if let (Some(a), Some(b)) = (self.date_from, self.date_to) {
            if a > b {
                return Err(Error::InvalidInput(format!("date range {a}..{b} is empty")));
            }
        }
        Ok(())
    }

    pub fn keeps(&self, article: &Article) -> bool {
        self.keeps_parts(article.date, &article.language, &article.attribution, &article.text, &article.tags)
    }

    pub(crate) fn keeps_parts(
        &self,
        date: NaiveDate,
        language: &str,
        attribution: &str,
        text: &str,
        tags: &[String],
    ) -> bool {
        if attribution != self.required_attribution || language != self.required_language {
            return false;
        }
        if self.date_from.is_some_and(|from| date < from) || self.date_to.is_some_and(|to| date > to) {
            return false;
        }
        if tags.iter().any(|t| self.excluded_tags.contains(t)) {
            return false;
        }
        let body = text.trim_start();
        if self.dateline_deny.iter().any(|p| body.starts_with(p.as_str())) {
            return false;
        }
        self.dateline_allow.is_empty() || self.dateline_allow.iter().any(|p| body.starts_with(p.as_str()))
    }
}

/// Free-function form of [`FilterSpec::keeps`].
pub fn filter_article(article: &Article, filter: &FilterSpec) -> bool {
    filter.keeps(article)
}

/// Opens a corpus file, decompressing `.gz` by extension.
pub fn open_corpus(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let gz = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    Ok(if gz {
        Box::new(BufReader::with_capacity(1 << 20, MultiGzDecoder::new(file)))
    } else {
        Box::new(BufReader::with_capacity(1 << 20, file))
    })
}
