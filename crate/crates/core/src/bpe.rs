//! Byte-pair encoding.
//!
//! Learning starts from every distinct word as its characters followed by an
//! end-of-word marker symbol, then repeatedly merges the adjacent symbol pair
//! with the highest frequency (weighted by word counts). Ties go to the
//! lexicographically smallest `(left, right)` pair. Learning stops after the
//! requested number of merges or when no pair occurs at least twice.
//!
//! Applying a model replays the merges in learned order, each one over the
//! whole word, left to right.
//!
//! In segmented text, every subword except the last of a word carries the
//! continuation suffix `@@`, so `"bertemu"` may come out as `"ber@@ temu"`.
//! Removing every `"@@ "` restores the tokenized line.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::rc::Rc;

use thiserror::Error;

use crate::text::Sentence;

pub const DEFAULT_END_MARKER: &str = "</w>";
pub const CONTINUATION: &str = "@@";
const HEADER: &str = "#bpe-merges v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BpeError {
    #[error("cannot learn merges from a corpus without words")]
    EmptyCorpus,
    #[error("merge file line {line}: {reason}")]
    Format { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeModel {
    merges: Vec<(String, String)>,
    end_marker: String,
    ranks: HashMap<(String, String), usize>,
}

impl BpeModel {
    pub fn new(merges: Vec<(String, String)>, end_marker: impl Into<String>) -> Self {
        let mut ranks = HashMap::with_capacity(merges.len());
        for (rank, pair) in merges.iter().enumerate() {
            // a repeated rule can never fire again; keep its first rank
            ranks.entry(pair.clone()).or_insert(rank);
        }
        Self {
            merges,
            end_marker: end_marker.into(),
            ranks,
        }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), DEFAULT_END_MARKER)
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn merge_count(&self) -> usize {
        self.merges.len()
    }

    pub fn end_marker(&self) -> &str {
        &self.end_marker
    }

    /// The first `n` merges as a model of their own.
    pub fn truncated(&self, n: usize) -> Self {
        Self::new(
            self.merges[..n.min(self.merges.len())].to_vec(),
            self.end_marker.clone(),
        )
    }

    /// Segments one word. The last symbol ends with the end marker.
    pub fn apply(&self, word: &str) -> Vec<String> {
        let mut symbols = initial_symbols(word, &self.end_marker);
        let mut floor: Option<usize> = None;
        loop {
            // lowest-ranked rule above the last applied one
            let next = symbols
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0].clone(), w[1].clone())))
                .filter(|&&r| floor.is_none_or(|f| r > f))
                .min()
                .copied();
            let Some(rank) = next else { break };
            let (left, right) = &self.merges[rank];
            symbols = merge_word(&symbols, left, right);
            floor = Some(rank);
        }
        symbols
    }

    /// Subwords of a word with the end marker removed and continuation
    /// suffixes added, ready to be joined with spaces.
    pub fn pieces(&self, word: &str) -> Vec<String> {
        let mut symbols = self.apply(word);
        if let Some(last) = symbols.last_mut() {
            if let Some(stripped) = last.strip_suffix(self.end_marker.as_str()) {
                *last = stripped.to_owned();
            }
        }
        if symbols.len() > 1 && symbols.last().is_some_and(String::is_empty) {
            symbols.pop();
        }
        let n = symbols.len();
        symbols
            .into_iter()
            .enumerate()
            .map(|(i, mut s)| {
                if i + 1 < n {
                    s.push_str(CONTINUATION);
                }
                s
            })
            .collect()
    }

    /// Writes the model in its merge-file format.
    pub fn to_merge_file(&self) -> String {
        let mut out = format!("{HEADER} end_marker={}\n", self.end_marker);
        for (l, r) in &self.merges {
            let _ = writeln!(out, "{l} {r}");
        }
        out
    }

    pub fn from_merge_file(source: &str) -> Result<Self, BpeError> {
        let mut lines = source.lines();
        let header = lines.next().ok_or(BpeError::Format {
            line: 1,
            reason: "missing header".into(),
        })?;
        let end_marker = header
            .trim_end()
            .strip_prefix(HEADER)
            .and_then(|rest| rest.trim().strip_prefix("end_marker="))
            .filter(|m| !m.is_empty() && !m.contains(char::is_whitespace))
            .ok_or_else(|| BpeError::Format {
                line: 1,
                reason: format!("expected `{HEADER} end_marker=<marker>`"),
            })?;
        let mut merges = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                    merges.push((l.to_owned(), r.to_owned()));
                }
                _ => {
                    return Err(BpeError::Format {
                        line: i + 2,
                        reason: format!("expected `left right`, got {line:?}"),
                    })
                }
            }
        }
        Ok(Self::new(merges, end_marker))
    }
}

fn initial_symbols(word: &str, marker: &str) -> Vec<String> {
    word.chars()
        .map(String::from)
        .chain(std::iter::once(marker.to_owned()))
        .collect()
}

fn merge_word<S>(symbols: &[S], left: &str, right: &str) -> Vec<S>
where
    S: AsRef<str> + Clone + From<String>,
{
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i].as_ref() == left && symbols[i + 1].as_ref() == right {
            out.push(S::from(format!("{left}{right}")));
            i += 2;
        } else {
            out.push(symbols[i].clone());
            i += 1;
        }
    }
    out
}

/// Distinct word surfaces with their frequencies, punctuation excluded.
pub fn word_counts(corpus: &[Sentence]) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for w in corpus.iter().flat_map(Sentence::words) {
        *counts.entry(w.surface().to_owned()).or_default() += 1;
    }
    counts
}

type Sym = Rc<str>;
type Pair = (Sym, Sym);

struct Learner {
    words: Vec<(Vec<Sym>, u64)>,
    counts: HashMap<Pair, u64>,
    queue: BTreeSet<(Reverse<u64>, Sym, Sym)>,
    occurs_in: HashMap<Pair, HashSet<usize>>,
}

impl Learner {
    fn new(counts: &BTreeMap<String, u64>, marker: &str) -> Self {
        let mut learner = Self {
            words: Vec::with_capacity(counts.len()),
            counts: HashMap::new(),
            queue: BTreeSet::new(),
            occurs_in: HashMap::new(),
        };
        for (word, &freq) in counts {
            let symbols: Vec<Sym> = initial_symbols(word, marker).into_iter().map(Sym::from).collect();
            let idx = learner.words.len();
            learner.add_pairs(&symbols, freq, idx);
            learner.words.push((symbols, freq));
        }
        learner
    }

    fn adjust(&mut self, pair: Pair, delta: i128) {
        let old = self.counts.get(&pair).copied().unwrap_or(0);
        let new = u64::try_from(i128::from(old) + delta).expect("pair counts stay non-negative");
        if old > 0 {
            self.queue.remove(&(Reverse(old), pair.0.clone(), pair.1.clone()));
        }
        if new > 0 {
            self.queue.insert((Reverse(new), pair.0.clone(), pair.1.clone()));
            self.counts.insert(pair, new);
        } else {
            self.counts.remove(&pair);
        }
    }

    fn add_pairs(&mut self, symbols: &[Sym], freq: u64, idx: usize) {
        for w in symbols.windows(2) {
            let pair = (w[0].clone(), w[1].clone());
            self.occurs_in.entry(pair.clone()).or_default().insert(idx);
            self.adjust(pair, i128::from(freq));
        }
    }

    fn remove_pairs(&mut self, symbols: &[Sym], freq: u64) {
        for w in symbols.windows(2) {
            self.adjust((w[0].clone(), w[1].clone()), -i128::from(freq));
        }
    }

    fn best(&self) -> Option<(u64, Pair)> {
        self.queue
            .first()
            .map(|(Reverse(c), l, r)| (*c, (l.clone(), r.clone())))
    }

    fn merge(&mut self, (left, right): &Pair) {
        let mut targets: Vec<usize> = self
            .occurs_in
            .remove(&(left.clone(), right.clone()))
            .unwrap_or_default()
            .into_iter()
            .collect();
        targets.sort_unstable();
        for idx in targets {
            let (old, freq) = self.words[idx].clone();
            let new: Vec<Sym> = merge_word(&old, left, right);
            if new.len() == old.len() {
                continue;
            }
            self.remove_pairs(&old, freq);
            self.add_pairs(&new, freq, idx);
            self.words[idx].0 = new;
        }
    }
}

/// A learned model together with the final segmentation of every training
/// word.
#[derive(Debug, Clone)]
pub struct Learned {
    pub model: BpeModel,
    pub segmentations: BTreeMap<String, Vec<String>>,
}

pub fn learn_bpe_detailed(corpus: &[Sentence], num_merges: usize, end_marker: &str) -> Result<Learned, BpeError> {
    let counts = word_counts(corpus);
    if counts.is_empty() {
        return Err(BpeError::EmptyCorpus);
    }
    let mut learner = Learner::new(&counts, end_marker);
    let mut merges = Vec::with_capacity(num_merges.min(1 << 16));
    while merges.len() < num_merges {
        let Some((count, pair)) = learner.best() else { break };
        if count < 2 {
            break;
        }
        learner.merge(&pair);
        merges.push((pair.0.to_string(), pair.1.to_string()));
    }
    let segmentations = counts
        .keys()
        .zip(&learner.words)
        .map(|(w, (symbols, _))| (w.clone(), symbols.iter().map(|s| s.to_string()).collect()))
        .collect();
    Ok(Learned {
        model: BpeModel::new(merges, end_marker),
        segmentations,
    })
}

pub fn learn_bpe(corpus: &[Sentence], num_merges: usize) -> Result<BpeModel, BpeError> {
    learn_bpe_detailed(corpus, num_merges, DEFAULT_END_MARKER).map(|l| l.model)
}

pub fn apply_bpe(model: &BpeModel, word: &str) -> Vec<String> {
    model.apply(word)
}

/// Segments every word token; punctuation passes through as one piece.
pub fn segment_corpus(model: &BpeModel, corpus: &[Sentence]) -> Vec<Vec<String>> {
    let mut cache: HashMap<&str, Vec<String>> = HashMap::new();
    corpus
        .iter()
        .map(|sentence| {
            let mut out = Vec::new();
            for token in sentence.tokens() {
                if token.is_word() {
                    let pieces = cache
                        .entry(token.surface())
                        .or_insert_with(|| model.pieces(token.surface()));
                    out.extend(pieces.iter().cloned());
                } else {
                    out.push(token.surface().to_owned());
                }
            }
            out
        })
        .collect()
}

/// Joins a segmented sentence into a line.
pub fn segmented_line(pieces: &[String]) -> String {
    pieces.join(" ")
}

/// Undoes segmentation: the tokens of the original sentence separated by
/// single spaces.
pub fn desegment_line(line: &str) -> String {
    line.replace(&format!("{CONTINUATION} "), "")
}
