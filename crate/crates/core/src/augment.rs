//! Probabilistic formal → colloquial substitution.
//!
//! Every dictionary word of a source sentence gets a uniform draw `u` in
//! `[0, 1)`. When `u < threshold` the word is replaced by one of its variants,
//! chosen uniformly by a second draw. Unmatched words and punctuation pass
//! through, and the target side of a pair is never touched. The expected
//! fraction of transformed tokens is therefore `threshold * coverage`.
//!
//! Randomness is per pair: pair `i` of a run with master seed `s` draws from
//! [`PairRng::new(s, i)`](PairRng::new), so the output does not depend on how
//! the corpus is split across workers.

use std::collections::HashSet;
use std::num::NonZeroUsize;
use std::thread;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::lexicon::Lexicon;
use crate::num::Real;
use crate::text::{apply_casing, classify_str, Sentence, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AugmentError {
    #[error("threshold {0} is outside [0, 1]")]
    ThresholdOutOfRange(String),
    #[error("pair index {0} occurs more than once")]
    DuplicateIndex(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentationConfig<T> {
    threshold: T,
    master_seed: u64,
    preserve_casing: bool,
}

impl<T: Real> AugmentationConfig<T> {
    /// Casing preservation is on by default.
    pub fn new(threshold: T, master_seed: u64) -> Result<Self, AugmentError> {
        // NaN fails both comparisons
        if !(threshold >= T::zero() && threshold <= T::one()) {
            return Err(AugmentError::ThresholdOutOfRange(threshold.to_string()));
        }
        Ok(Self {
            threshold,
            master_seed,
            preserve_casing: true,
        })
    }

    pub fn with_preserve_casing(mut self, preserve: bool) -> Self {
        self.preserve_casing = preserve;
        self
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn preserve_casing(&self) -> bool {
        self.preserve_casing
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random stream for one corpus pair.
///
/// Construction: the 256-bit ChaCha8 key is four consecutive SplitMix64
/// outputs started from `master_seed`, written little-endian; the ChaCha
/// stream id is `pair_index`. Streams for distinct indices under one key are
/// independent keystreams, and ChaCha output is identical on every platform.
#[derive(Debug, Clone)]
pub struct PairRng {
    inner: ChaCha8Rng,
}

impl PairRng {
    pub fn new(master_seed: u64, pair_index: u64) -> Self {
        let mut state = master_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(pair_index);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`: the top 53 bits of one `u64` draw.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Index in `0..n` from exactly one `u64` draw, by the high half of the
    /// 128-bit product. `n` must be non-zero.
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((u128::from(self.next_u64()) * n as u128) >> 64) as usize
    }
}

pub fn derive_rng(master_seed: u64, pair_index: u64) -> PairRng {
    PairRng::new(master_seed, pair_index)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceOutcome {
    pub sentence: Sentence,
    pub matched: usize,
    pub transformed: usize,
}

pub fn transform_sentence<T: Real>(
    sentence: &Sentence,
    lexicon: &Lexicon,
    config: &AugmentationConfig<T>,
    rng: &mut PairRng,
) -> SentenceOutcome {
    let threshold = config.threshold.to_f64().expect("threshold is finite");
    let mut matched = 0;
    let mut transformed = 0;
    let tokens: Vec<Token> = sentence
        .tokens()
        .iter()
        .map(|token| {
            let Some(entry) = lexicon.lookup_token(token) else {
                return token.clone();
            };
            matched += 1;
            if rng.next_unit() >= threshold {
                return token.clone();
            }
            let variant = &entry.variants()[rng.next_index(entry.variants().len())];
            transformed += 1;
            let surface = if config.preserve_casing {
                apply_casing(classify_str(token.surface()), variant)
            } else {
                variant.clone()
            };
            token
                .replace_surface(surface)
                .expect("lexicon variants are single word tokens")
        })
        .collect();
    SentenceOutcome {
        sentence: Sentence::new(tokens),
        matched,
        transformed,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelPair {
    pub index: u64,
    pub source: Sentence,
    /// Opaque target-language text.
    pub target: String,
}

impl ParallelPair {
    pub fn new(index: u64, source: Sentence, target: impl Into<String>) -> Self {
        Self {
            index,
            source,
            target: target.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairCounts {
    pub index: u64,
    pub tokens: u64,
    pub matched: u64,
    pub transformed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransformReport {
    pub tokens_total: u64,
    pub tokens_matched: u64,
    pub tokens_transformed: u64,
    pub per_pair: Vec<PairCounts>,
}

impl TransformReport {
    fn push(&mut self, counts: PairCounts) {
        self.tokens_total += counts.tokens;
        self.tokens_matched += counts.matched;
        self.tokens_transformed += counts.transformed;
        self.per_pair.push(counts);
    }
}

fn check_unique(pairs: &[ParallelPair]) -> Result<(), AugmentError> {
    let mut seen = HashSet::with_capacity(pairs.len());
    for p in pairs {
        if !seen.insert(p.index) {
            return Err(AugmentError::DuplicateIndex(p.index));
        }
    }
    Ok(())
}

fn transform_pair<T: Real>(
    pair: &ParallelPair,
    lexicon: &Lexicon,
    config: &AugmentationConfig<T>,
) -> (ParallelPair, PairCounts) {
    let mut rng = PairRng::new(config.master_seed, pair.index);
    let outcome = transform_sentence(&pair.source, lexicon, config, &mut rng);
    let counts = PairCounts {
        index: pair.index,
        tokens: pair.source.len() as u64,
        matched: outcome.matched as u64,
        transformed: outcome.transformed as u64,
    };
    let out = ParallelPair {
        index: pair.index,
        source: outcome.sentence,
        target: pair.target.clone(),
    };
    (out, counts)
}

/// Transforms a corpus using one worker per available core.
pub fn transform_corpus<T: Real>(
    pairs: &[ParallelPair],
    lexicon: &Lexicon,
    config: &AugmentationConfig<T>,
) -> Result<(Vec<ParallelPair>, TransformReport), AugmentError> {
    let workers = thread::available_parallelism().map_or(1, NonZeroUsize::get);
    transform_corpus_with_workers(pairs, lexicon, config, workers)
}

/// Transforms a corpus split into `workers` contiguous partitions processed
/// on scoped threads. The result is identical for every worker count.
pub fn transform_corpus_with_workers<T: Real>(
    pairs: &[ParallelPair],
    lexicon: &Lexicon,
    config: &AugmentationConfig<T>,
    workers: usize,
) -> Result<(Vec<ParallelPair>, TransformReport), AugmentError> {
    check_unique(pairs)?;
    let mut report = TransformReport::default();
    if pairs.is_empty() {
        return Ok((Vec::new(), report));
    }
    let chunk = pairs.len().div_ceil(workers.max(1));
    let parts: Vec<Vec<(ParallelPair, PairCounts)>> = thread::scope(|scope| {
        let handles: Vec<_> = pairs
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|p| transform_pair(p, lexicon, config))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("augmentation worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(pairs.len());
    for (pair, counts) in parts.into_iter().flatten() {
        report.push(counts);
        out.push(pair);
    }
    Ok((out, report))
}
