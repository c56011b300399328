//! Formal → colloquial word dictionary.
//!
//! File format, one entry per line (UTF-8, LF or CRLF):
//!
//! ```text
//! # comment
//! formal<TAB>variant1,variant2,...
//! ```
//!
//! Keys and variants are lowercased on load. A key that appears on several
//! lines accumulates the variants of all of them, first-seen order, without
//! duplicates. Variants equal to their key are dropped. Keys and variants
//! must each be a single word token, so a substitution never changes the
//! token count of a sentence. Blank lines are skipped.

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::num::{fraction, Fraction};
use crate::text::{tokenize, Sentence, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: ParseProblem },
    #[error("line {line}: entry {key:?} has no variant other than itself")]
    NoVariants { line: usize, key: String },
    #[error("corpus has no tokens")]
    EmptyCorpus,
}

impl LexiconError {
    pub fn line(&self) -> Option<usize> {
        match self {
            Self::Parse { line, .. } | Self::NoVariants { line, .. } => Some(*line),
            Self::EmptyCorpus => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseProblem {
    MissingTab,
    EmptyKey,
    EmptyVariantList,
    /// Key is a phrase or carries punctuation.
    InvalidKey(String),
    InvalidVariant(String),
}

impl fmt::Display for ParseProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingTab => f.write_str("missing tab between key and variants"),
            Self::EmptyKey => f.write_str("empty key"),
            Self::EmptyVariantList => f.write_str("empty variant list"),
            Self::InvalidKey(k) => write!(f, "key {k:?} is not a single word"),
            Self::InvalidVariant(v) => write!(f, "variant {v:?} is not a single word"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    formal: String,
    variants: Vec<String>,
}

impl LexiconEntry {
    pub fn formal(&self) -> &str {
        &self.formal
    }

    /// Never empty.
    pub fn variants(&self) -> &[String] {
        &self.variants
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: IndexMap<String, LexiconEntry>,
}

fn single_word(s: &str) -> bool {
    let sentence = tokenize(s);
    sentence.len() == 1 && sentence.tokens()[0].is_word() && sentence.tokens()[0].surface() == s
}

/// A line split into key and raw variants, before key merging.
struct ParsedLine {
    key: String,
    variants: Vec<String>,
}

fn parse_line(text: &str, line: usize) -> Result<Option<ParsedLine>, LexiconError> {
    let text = text.strip_suffix('\r').unwrap_or(text);
    if text.trim().is_empty() || text.starts_with('#') {
        return Ok(None);
    }
    let err = |reason| LexiconError::Parse { line, reason };
    let (key, rest) = text.split_once('\t').ok_or(err(ParseProblem::MissingTab))?;
    let key = key.trim().to_lowercase();
    if key.is_empty() {
        return Err(err(ParseProblem::EmptyKey));
    }
    if !single_word(&key) {
        return Err(err(ParseProblem::InvalidKey(key)));
    }
    let variants: Vec<String> = rest
        .split(',')
        .map(|v| v.trim().to_lowercase())
        .filter(|v| !v.is_empty())
        .collect();
    if variants.is_empty() {
        return Err(err(ParseProblem::EmptyVariantList));
    }
    if let Some(bad) = variants.iter().find(|v| !single_word(v)) {
        return Err(err(ParseProblem::InvalidVariant(bad.clone())));
    }
    Ok(Some(ParsedLine { key, variants }))
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses lexicon text, stopping at the first problem.
    pub fn parse(source: &str) -> Result<Self, LexiconError> {
        let (lexicon, mut problems) = Self::parse_collecting(source);
        match problems.is_empty() {
            true => Ok(lexicon),
            false => Err(problems.swap_remove(0)),
        }
    }

    /// Parses lexicon text, collecting every line-level problem. The returned
    /// lexicon holds the entries that were valid.
    pub fn parse_collecting(source: &str) -> (Self, Vec<LexiconError>) {
        let mut lexicon = Self::new();
        let mut problems = Vec::new();
        // line on which each key first appeared, for empty-entry reporting
        let mut first_line: IndexMap<String, usize> = IndexMap::new();
        for (i, text) in source.split('\n').enumerate() {
            let line = i + 1;
            match parse_line(text, line) {
                Ok(None) => {}
                Ok(Some(parsed)) => {
                    first_line.entry(parsed.key.clone()).or_insert(line);
                    lexicon.insert_unchecked(&parsed.key, parsed.variants);
                }
                Err(e) => problems.push(e),
            }
        }
        for (key, line) in first_line {
            if lexicon.entries.get(&key).is_some_and(|e| e.variants.is_empty()) {
                lexicon.entries.shift_remove(&key);
                problems.push(LexiconError::NoVariants { line, key });
            }
        }
        problems.sort_by_key(|p| p.line());
        (lexicon, problems)
    }

    fn insert_unchecked(&mut self, key: &str, variants: Vec<String>) {
        let entry = self.entries.entry(key.to_owned()).or_insert_with(|| LexiconEntry {
            formal: key.to_owned(),
            variants: Vec::new(),
        });
        for v in variants {
            if v != key && !entry.variants.contains(&v) {
                entry.variants.push(v);
            }
        }
    }

    /// Adds variants for a key with the same normalization as loading.
    pub fn insert<I, S>(&mut self, key: &str, variants: I) -> Result<(), LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let joined = variants
            .into_iter()
            .map(|v| v.as_ref().to_owned())
            .collect::<Vec<_>>()
            .join(",");
        let parsed = parse_line(&format!("{key}\t{joined}"), 1)?.ok_or(LexiconError::Parse {
            line: 1,
            reason: ParseProblem::EmptyKey,
        })?;
        let key = parsed.key.clone();
        let existed = self.entries.contains_key(&key);
        self.insert_unchecked(&key, parsed.variants);
        if !existed && self.entries[&key].variants.is_empty() {
            self.entries.shift_remove(&key);
            return Err(LexiconError::NoVariants { line: 1, key });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    /// Case-insensitive exact match.
    pub fn lookup(&self, word: &str) -> Option<&LexiconEntry> {
        match self.entries.get(word) {
            Some(e) => Some(e),
            None => self.entries.get(&word.to_lowercase()),
        }
    }

    /// Like [`Lexicon::lookup`], but punctuation tokens never match.
    pub fn lookup_token(&self, token: &Token) -> Option<&LexiconEntry> {
        if token.is_word() {
            self.lookup(token.surface())
        } else {
            None
        }
    }

    /// Fraction of all tokens (punctuation included) that are dictionary
    /// words. This is the transformed fraction a threshold of 1 produces.
    pub fn coverage(&self, corpus: &[Sentence]) -> Result<Fraction, LexiconError> {
        let (matched, total) = corpus.iter().fold((0u64, 0u64), |(m, t), s| {
            let hits = s.tokens().iter().filter(|t| self.lookup_token(t).is_some()).count();
            (m + hits as u64, t + s.len() as u64)
        });
        if total == 0 {
            return Err(LexiconError::EmptyCorpus);
        }
        Ok(fraction(matched, total))
    }

    /// Renders the lexicon in its file format, entries in insertion order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for entry in self.entries.values() {
            out.push_str(&entry.formal);
            out.push('\t');
            out.push_str(&entry.variants.join(","));
            out.push('\n');
        }
        out
    }
}
