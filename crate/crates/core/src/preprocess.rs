//! Raw text to keyword sets: tokenization, plural folding, stopword removal
//! and the in-document frequency filter.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// Default minimum number of occurrences inside one document.
pub const DEFAULT_MIN_DOC_FREQ: usize = 2;

/// A normalized keyword: lowercase, alphanumeric (hyphens allowed), starting
/// with a letter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Keyword(String);

impl Keyword {
    pub fn new(value: impl Into<String>) -> Result<Self> {
        let value = value.into();
        let mut chars = value.chars();
        let valid = matches!(chars.next(), Some(c) if c.is_alphabetic())
            && value.chars().all(|c| c.is_alphanumeric() || c == '-')
            && value.to_lowercase() == value;
        if valid {
            Ok(Keyword(value))
        } else {
            Err(Error::InvalidConfig(format!(
                "`{value}` is not a valid keyword"
            )))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Keyword {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Keyword::new(value)
    }
}

impl From<Keyword> for String {
    fn from(k: Keyword) -> String {
        k.0
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Keyword {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// Parses one word per line; `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or(""))
            .flat_map(tokenize)
            .collect();
        StopwordList { words }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn empty() -> Self {
        StopwordList {
            words: HashSet::new(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}

impl FromIterator<String> for StopwordList {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        StopwordList {
            words: iter.into_iter().flat_map(|w| tokenize(&w)).collect(),
        }
    }
}

/// The deduplicated keyword set of one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub doc_id: String,
    pub items: BTreeSet<Keyword>,
}

impl Transaction {
    pub fn new(doc_id: impl Into<String>, items: impl IntoIterator<Item = Keyword>) -> Self {
        Transaction {
            doc_id: doc_id.into(),
            items: items.into_iter().collect(),
        }
    }

    /// Convenience constructor for already-normalized words; panics on invalid input.
    pub fn from_words<S: AsRef<str>>(doc_id: impl Into<String>, words: &[S]) -> Self {
        Self::new(
            doc_id,
            words
                .iter()
                .map(|w| Keyword::new(w.as_ref()).expect("valid keyword")),
        )
    }

    pub fn contains_all<'a>(&self, items: impl IntoIterator<Item = &'a Keyword>) -> bool {
        items.into_iter().all(|k| self.items.contains(k))
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub stopwords: StopwordList,
    pub min_doc_freq: usize,
}

impl PreprocessConfig {
    pub fn new(stopwords: StopwordList, min_doc_freq: usize) -> Result<Self> {
        if min_doc_freq == 0 {
            return Err(Error::InvalidConfig(
                "min_doc_freq must be at least 1".into(),
            ));
        }
        Ok(PreprocessConfig {
            stopwords,
            min_doc_freq,
        })
    }
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            stopwords: StopwordList::default(),
            min_doc_freq: DEFAULT_MIN_DOC_FREQ,
        }
    }
}

/// Lowercases, then splits on every non-alphanumeric character. Tokens that do
/// not start with a letter (numbers, `3d`) are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().next().is_some_and(char::is_alphabetic))
        .map(str::to_owned)
        .collect()
}

/// Suffix-stripping singularization.
///
/// Rules, first match wins: `-ies` to `-y` (words longer than four letters);
/// `-sses` to `-ss`; `-es` dropped after `x`, `ch` or `sh`; a final `-s`
/// dropped from words longer than three letters unless they end in `ss`, `us`
/// or `is`. Deliberately crude: `parentheses` becomes `parenthese`.
pub fn normalize_plural(token: &str) -> String {
    let len = token.chars().count();
    if len > 4 && token.ends_with("ies") {
        return format!("{}y", &token[..token.len() - 3]);
    }
    if token.ends_with("sses") {
        return token[..token.len() - 2].to_owned();
    }
    if ["xes", "ches", "shes"].iter().any(|s| token.ends_with(s)) {
        return token[..token.len() - 2].to_owned();
    }
    if len > 3 && token.ends_with('s') && !["ss", "us", "is"].iter().any(|s| token.ends_with(s)) {
        return token[..token.len() - 1].to_owned();
    }
    token.to_owned()
}

/// Normalized keyword counts for a text, stopwords removed.
pub fn keyword_counts(text: &str, stopwords: &StopwordList) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for token in tokenize(text) {
        if stopwords.contains(&token) {
            continue;
        }
        let word = normalize_plural(&token);
        if stopwords.contains(&word) {
            continue;
        }
        *counts.entry(word).or_insert(0) += 1;
    }
    counts
}

/// Keywords occurring at least `min_doc_freq` times in the document.
pub fn extract_keywords(doc: &Document, config: &PreprocessConfig) -> Transaction {
    extract_from_text(&doc.id, &doc.text, config)
}

pub fn extract_from_text(doc_id: &str, text: &str, config: &PreprocessConfig) -> Transaction {
    let items = keyword_counts(text, &config.stopwords)
        .into_iter()
        .filter(|&(_, n)| n >= config.min_doc_freq)
        .filter_map(|(w, _)| Keyword::new(w).ok());
    Transaction::new(doc_id, items)
}
