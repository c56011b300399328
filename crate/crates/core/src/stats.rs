//! Corpus statistics: counts, OOV rate, transformed percentage, and an add-k
//! smoothed n-gram language model for perplexity.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::augment::TransformReport;
use crate::num::{fraction, Fraction, Real};
use crate::text::Sentence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("corpus has no word tokens")]
    NoWordTokens,
    #[error("corpus has no tokens")]
    NoTokens,
    #[error("cannot train a language model on an empty corpus")]
    EmptyTrainingCorpus,
    #[error("n-gram order must be at least 1")]
    ZeroOrder,
    #[error("smoothing constant must be positive and finite, got {0}")]
    BadSmoothing(String),
    #[error("zero-probability event while scoring")]
    ZeroProbability,
}

/// Reference word list. Membership is tested on the lowercase form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: HashSet<String>,
}

impl Vocabulary {
    /// One word per line; blank lines are ignored and words are lowercased.
    pub fn parse(source: &str) -> Self {
        source.lines().map(str::trim).filter(|l| !l.is_empty()).collect()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word) || self.words.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for Vocabulary {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self {
            words: iter.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }
}

/// Fraction of word tokens missing from `vocab`. Punctuation is ignored.
pub fn oov_rate(corpus: &[Sentence], vocab: &Vocabulary) -> Result<Fraction, StatsError> {
    let (oov, words) = corpus
        .iter()
        .flat_map(Sentence::words)
        .fold((0u64, 0u64), |(oov, n), w| {
            (oov + u64::from(!vocab.contains(w.surface())), n + 1)
        });
    if words == 0 {
        return Err(StatsError::NoWordTokens);
    }
    Ok(fraction(oov, words))
}

pub fn transformed_percentage(report: &TransformReport) -> Result<Fraction, StatsError> {
    if report.tokens_total == 0 {
        return Err(StatsError::NoTokens);
    }
    Ok(fraction(report.tokens_transformed, report.tokens_total))
}

/// One row of the corpus overview table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats<T> {
    pub sentences: u64,
    pub total_tokens: u64,
    pub oov_rate: Option<T>,
    pub avg_tokens_per_sentence: Option<T>,
    pub perplexity: Option<T>,
}

/// Sentence and token counts. OOV rate and perplexity are left empty.
pub fn basic_stats<T: Real>(corpus: &[Sentence]) -> CorpusStats<T> {
    let sentences = corpus.len() as u64;
    let total_tokens: u64 = corpus.iter().map(|s| s.len() as u64).sum();
    let avg = (sentences > 0).then(|| T::from_count(total_tokens) / T::from_count(sentences));
    CorpusStats {
        sentences,
        total_tokens,
        oov_rate: None,
        avg_tokens_per_sentence: avg,
        perplexity: None,
    }
}

type Sym = u32;
const UNK: Sym = 0;
const BOS: Sym = 1;
const EOS: Sym = 2;
const FIRST_WORD: Sym = 3;

pub const UNK_SYMBOL: &str = "<unk>";
pub const BOS_SYMBOL: &str = "<s>";
pub const EOS_SYMBOL: &str = "</s>";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgramConfig<T> {
    pub order: usize,
    pub k: T,
    /// Map words seen once in training to the unknown symbol.
    pub unk_singletons: bool,
}

impl<T: Real> Default for NgramConfig<T> {
    fn default() -> Self {
        Self {
            order: 3,
            k: T::lit(0.1),
            unk_singletons: false,
        }
    }
}

/// Add-k smoothed n-gram model over lowercased word tokens.
///
/// Each sentence is padded with `order - 1` start symbols and one end
/// symbol. The predicted symbol set is every training word type, the end
/// symbol, and the unknown symbol:
///
/// `P(w | h) = (c(h, w) + k) / (c(h) + k * V)`
///
/// where `c(h)` counts `h` as a history (the sum of `c(h, w)` over `w`), so
/// each conditional distribution sums to one.
#[derive(Debug, Clone)]
pub struct NgramModel<T> {
    order: usize,
    k: T,
    ids: HashMap<String, Sym>,
    ngrams: HashMap<Vec<Sym>, u64>,
    histories: HashMap<Vec<Sym>, u64>,
}

fn sentence_words(s: &Sentence) -> impl Iterator<Item = String> + '_ {
    s.words().map(|w| w.lowercase())
}

impl<T: Real> NgramModel<T> {
    pub fn train(corpus: &[Sentence], config: &NgramConfig<T>) -> Result<Self, StatsError> {
        if corpus.is_empty() {
            return Err(StatsError::EmptyTrainingCorpus);
        }
        if config.order == 0 {
            return Err(StatsError::ZeroOrder);
        }
        if !(config.k > T::zero() && config.k.is_finite()) {
            return Err(StatsError::BadSmoothing(config.k.to_string()));
        }

        let mut freq: HashMap<String, u64> = HashMap::new();
        for w in corpus.iter().flat_map(sentence_words) {
            *freq.entry(w).or_default() += 1;
        }
        let mut types: Vec<&String> = freq
            .iter()
            .filter(|(_, &c)| !(config.unk_singletons && c == 1))
            .map(|(w, _)| w)
            .collect();
        types.sort();
        let ids: HashMap<String, Sym> = types
            .into_iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), FIRST_WORD + i as Sym))
            .collect();

        let mut model = Self {
            order: config.order,
            k: config.k,
            ids,
            ngrams: HashMap::new(),
            histories: HashMap::new(),
        };
        for sentence in corpus {
            let padded = model.padded(sentence);
            for window in padded.windows(model.order) {
                *model.ngrams.entry(window.to_vec()).or_default() += 1;
                *model.histories.entry(window[..model.order - 1].to_vec()).or_default() += 1;
            }
        }
        Ok(model)
    }

    fn id(&self, word: &str) -> Sym {
        self.ids.get(word).copied().unwrap_or(UNK)
    }

    fn padded(&self, sentence: &Sentence) -> Vec<Sym> {
        let mut out = vec![BOS; self.order - 1];
        out.extend(sentence_words(sentence).map(|w| self.id(&w)));
        out.push(EOS);
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing(&self) -> T {
        self.k
    }

    /// Number of predicted symbols: word types plus end and unknown.
    pub fn vocab_size(&self) -> usize {
        self.ids.len() + 2
    }

    /// Every predicted symbol, by name.
    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.ids.keys().map(String::as_str).chain([EOS_SYMBOL, UNK_SYMBOL])
    }

    fn resolve(&self, symbol: &str) -> Sym {
        match symbol {
            BOS_SYMBOL => BOS,
            EOS_SYMBOL => EOS,
            UNK_SYMBOL => UNK,
            w => self.id(&w.to_lowercase()),
        }
    }

    fn prob_ids(&self, history: &[Sym], next: Sym) -> T {
        let mut gram = history.to_vec();
        gram.push(next);
        let joint = self.ngrams.get(&gram).copied().unwrap_or(0);
        let hist = self.histories.get(history).copied().unwrap_or(0);
        (T::from_count(joint) + self.k) / (T::from_count(hist) + self.k * T::from_count(self.vocab_size() as u64))
    }

    /// `P(next | history)`. Only the last `order - 1` history symbols are
    /// used; a shorter history is left-padded with start symbols. Symbols may
    /// be words or the reserved `<s>`, `</s>`, `<unk>`.
    pub fn prob(&self, history: &[&str], next: &str) -> T {
        let n = self.order - 1;
        let mut h: Vec<Sym> = vec![BOS; n.saturating_sub(history.len())];
        let skip = history.len().saturating_sub(n);
        h.extend(history[skip..].iter().map(|s| self.resolve(s)));
        self.prob_ids(&h, self.resolve(next))
    }

    /// Total natural-log probability and number of scored symbols.
    pub fn log_likelihood(&self, corpus: &[Sentence]) -> Result<(T, u64), StatsError> {
        let mut total = T::zero();
        let mut count = 0u64;
        for sentence in corpus {
            let padded = self.padded(sentence);
            for window in padded.windows(self.order) {
                let (history, next) = window.split_at(self.order - 1);
                let p = self.prob_ids(history, next[0]);
                if p.is_nan() || p <= T::zero() {
                    return Err(StatsError::ZeroProbability);
                }
                total = total + p.ln();
                count += 1;
            }
        }
        Ok((total, count))
    }

    /// `exp(-(1/T) * sum(ln P))` over every word and end symbol.
    pub fn perplexity(&self, corpus: &[Sentence]) -> Result<T, StatsError> {
        if corpus.iter().all(|s| s.word_count() == 0) {
            return Err(StatsError::NoTokens);
        }
        let (ll, n) = self.log_likelihood(corpus)?;
        Ok((-ll / T::from_count(n)).exp())
    }
}

pub fn train_ngram<T: Real>(corpus: &[Sentence], order: usize, k: T) -> Result<NgramModel<T>, StatsError> {
    NgramModel::train(
        corpus,
        &NgramConfig {
            order,
            k,
            unk_singletons: false,
        },
    )
}

pub fn perplexity<T: Real>(model: &NgramModel<T>, corpus: &[Sentence]) -> Result<T, StatsError> {
    model.perplexity(corpus)
}
