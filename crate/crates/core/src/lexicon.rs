//! Excitement and anxiety word lists.
//!
//! Word-list files hold one word per line. Lines starting with `#` are
//! comments and blank lines are skipped. Entries are lowercased on load and
//! must each be a single token as produced by [`crate::scanner::tokenize`];
//! a word that could never be produced by the tokenizer would silently never
//! match, so it is rejected instead.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::scanner;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Emotion {
    Excitement,
    Anxiety,
}

/// The two validated emotion word lists. Immutable once built, so a single
/// instance can be shared by reference across scanner threads.
#[derive(Debug, Clone)]
pub struct Lexicon {
    excitement: BTreeSet<String>,
    anxiety: BTreeSet<String>,
    lookup: FxHashMap<Box<str>, Emotion>,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.excitement == other.excitement && self.anxiety == other.anxiety
    }
}

impl Eq for Lexicon {}

impl Lexicon {
    /// Builds a lexicon from two word collections, lowercasing every entry.
    pub fn new<I, J, S, T>(excitement: I, anxiety: J) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let excitement = normalize_entries(excitement, "excitement")?;
        let anxiety = normalize_entries(anxiety, "anxiety")?;

        if let Some(word) = excitement.intersection(&anxiety).next() {
            return Err(Error::Lexicon(format!(
                "'{word}' appears in both the excitement and anxiety lists"
            )));
        }

        let mut lookup = FxHashMap::default();
        lookup.reserve(excitement.len() + anxiety.len());
        for w in &excitement {
            lookup.insert(w.as_str().into(), Emotion::Excitement);
        }
        for w in &anxiety {
            lookup.insert(w.as_str().into(), Emotion::Anxiety);
        }

        Ok(Lexicon { excitement, anxiety, lookup })
    }

    pub fn load(excitement_path: impl AsRef<Path>, anxiety_path: impl AsRef<Path>) -> Result<Self> {
        let excitement = read_word_list(excitement_path.as_ref())?;
        let anxiety = read_word_list(anxiety_path.as_ref())?;
        Lexicon::new(excitement, anxiety)
    }

    /// Writes both lists, one word per line in sorted order.
    pub fn save(&self, excitement_path: impl AsRef<Path>, anxiety_path: impl AsRef<Path>) -> Result<()> {
        write_word_list(excitement_path.as_ref(), &self.excitement)?;
        write_word_list(anxiety_path.as_ref(), &self.anxiety)
    }

    pub fn excitement(&self) -> &BTreeSet<String> {
        &self.excitement
    }

    pub fn anxiety(&self) -> &BTreeSet<String> {
        &self.anxiety
    }

    /// Classifies an already-lowercased token.
    #[inline]
    pub fn classify(&self, token: &str) -> Option<Emotion> {
        self.lookup.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.lookup.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lookup.is_empty()
    }
}

/// Parses word-list text: `#` comment lines and blank lines are skipped,
/// surrounding whitespace (including a CR from CRLF files) is trimmed.
pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

fn read_word_list(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let words = parse_word_list(&text);
    if words.is_empty() {
        return Err(Error::Lexicon(format!("{} contains no words", path.display())));
    }
    Ok(words)
}

fn write_word_list(path: &Path, words: &BTreeSet<String>) -> Result<()> {
    let mut out = String::new();
    for w in words {
        out.push_str(w);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn normalize_entries<I, S>(words: I, list: &str) -> Result<BTreeSet<String>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut set = BTreeSet::new();
    for raw in words {
        let word = raw.as_ref().trim().to_lowercase();
        if word.is_empty() {
            return Err(Error::Lexicon(format!("empty entry in the {list} list")));
        }
        if word.chars().any(char::is_whitespace) {
            return Err(Error::Lexicon(format!(
                "'{word}' in the {list} list is a phrase; only single words are supported"
            )));
        }
        let tokens = scanner::tokenize(&word);
        if tokens.len() != 1 || tokens[0].text != word {
            return Err(Error::Lexicon(format!(
                "'{word}' in the {list} list is not a single token and would never match"
            )));
        }
        set.insert(word);
    }
    if set.is_empty() {
        return Err(Error::Lexicon(format!("the {list} list is empty")));
    }
    Ok(set)
}
