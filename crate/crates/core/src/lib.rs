//! Colloquial-style corpus augmentation and the corpus measurements that go
//! with it.
//!
//! The crate is organized bottom-up:
//!
//! - [`text`]: whitespace/punctuation tokenizer, detokenizer and casing helpers.
//! - [`lexicon`]: the formal → colloquial word dictionary.
//! - [`augment`]: seeded, per-pair probabilistic word substitution.
//! - [`stats`]: sentence/token counts, OOV rate and an add-k n-gram perplexity model.
//! - [`bpe`]: byte-pair-encoding learner and applier.
//! - [`bleu`]: corpus-level BLEU-4.
//!
//! Real-valued math is generic over [`Real`] (`f32` or `f64`). Rates that are
//! pure count ratios (coverage, OOV rate, transformed percentage) are returned
//! as exact [`Fraction`]s so that equalities between them hold without
//! rounding. The aliases below fix the scalar to `f64`, which is what the
//! command-line tool uses.

pub mod augment;
pub mod bleu;
pub mod bpe;
pub mod lexicon;
pub mod num;
pub mod stats;
pub mod text;

pub use crate::num::{Fraction, Real};

pub use crate::augment::{PairRng, ParallelPair, TransformReport};
pub use crate::bpe::BpeModel;
pub use crate::lexicon::{Lexicon, LexiconEntry};
pub use crate::stats::Vocabulary;
pub use crate::text::{CasingPattern, Sentence, Token, TokenKind};

/// Augmentation settings with an `f64` threshold.
pub type AugmentationConfig = augment::AugmentationConfig<f64>;
/// BLEU result in `f64`.
pub type BleuScore = bleu::BleuScore<f64>;
/// BLEU result in `f32`.
pub type BleuScore32 = bleu::BleuScore<f32>;
/// Corpus statistics in `f64`.
pub type CorpusStats = stats::CorpusStats<f64>;
/// Add-k n-gram model in `f64`.
pub type NgramModel = stats::NgramModel<f64>;
/// Add-k n-gram model in `f32`.
pub type NgramModel32 = stats::NgramModel<f32>;
