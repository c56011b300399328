//! Corpus-level BLEU-4 with a single reference per hypothesis.
//!
//! Clipped n-gram matches and hypothesis n-gram totals are summed over the
//! whole corpus for n = 1..=4. An order with no hypothesis n-grams anywhere in
//! the corpus is left out of the geometric mean. Without smoothing, a
//! populated order with zero matches makes the score 0; with epsilon
//! smoothing the zero numerator is replaced by epsilon.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;
use thiserror::Error;

use crate::num::Real;

pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BleuError {
    #[error("{hypotheses} hypotheses but {references} references")]
    LengthMismatch { hypotheses: usize, references: usize },
    #[error("no sentence pairs to score")]
    EmptyCorpus,
    #[error("reference length is zero")]
    ZeroReferenceLength,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum Smoothing<T> {
    #[default]
    None,
    /// Replace a zero match count with this value.
    Epsilon(T),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuScore<T> {
    /// 0 to 100.
    pub score: T,
    /// Modified precision per order; 0 for an order with no hypothesis n-grams.
    pub precisions: [T; MAX_ORDER],
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub brevity_penalty: T,
    pub hyp_length: u64,
    pub ref_length: u64,
}

impl<T: Real> BleuScore<T> {
    /// `BLEU = 71.7 (BP = 0.717, hyp_len = 3, ref_len = 4) 100.0/100.0/100.0/0.0`
    pub fn summary(&self) -> String {
        let precisions: Vec<String> = self
            .precisions
            .iter()
            .map(|p| format!("{:.1}", *p * T::lit(100.0)))
            .collect();
        format!(
            "BLEU = {:.1} (BP = {:.3}, hyp_len = {}, ref_len = {}) {}",
            self.score,
            self.brevity_penalty,
            self.hyp_length,
            self.ref_length,
            precisions.join("/")
        )
    }
}

/// 1 when the hypothesis is at least as long as the reference, otherwise
/// `exp(1 - ref/hyp)`; an empty hypothesis gets 0.
pub fn brevity_penalty<T: Real>(hyp_len: u64, ref_len: u64) -> Result<T, BleuError> {
    if ref_len == 0 {
        return Err(BleuError::ZeroReferenceLength);
    }
    if hyp_len == 0 {
        return Ok(T::zero());
    }
    if hyp_len >= ref_len {
        return Ok(T::one());
    }
    Ok((T::one() - T::from_count(ref_len) / T::from_count(hyp_len)).exp())
}

fn ngram_counts<W: Eq + Hash>(tokens: &[W], n: usize) -> HashMap<&[W], u64> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_default() += 1;
    }
    counts
}

pub fn corpus_bleu<T, W>(hypotheses: &[Vec<W>], references: &[Vec<W>]) -> Result<BleuScore<T>, BleuError>
where
    T: Real,
    W: Eq + Hash,
{
    corpus_bleu_with(hypotheses, references, Smoothing::None)
}

pub fn corpus_bleu_with<T, W>(
    hypotheses: &[Vec<W>],
    references: &[Vec<W>],
    smoothing: Smoothing<T>,
) -> Result<BleuScore<T>, BleuError>
where
    T: Real,
    W: Eq + Hash,
{
    if hypotheses.len() != references.len() {
        return Err(BleuError::LengthMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(BleuError::EmptyCorpus);
    }

    let mut matches = [0u64; MAX_ORDER];
    let mut totals = [0u64; MAX_ORDER];
    let mut hyp_length = 0u64;
    let mut ref_length = 0u64;
    for (hyp, reference) in hypotheses.iter().zip(references) {
        hyp_length += hyp.len() as u64;
        ref_length += reference.len() as u64;
        for n in 1..=MAX_ORDER {
            let ref_counts = ngram_counts(reference, n);
            for (gram, count) in ngram_counts(hyp, n) {
                let clip = ref_counts.get(gram).copied().unwrap_or(0);
                matches[n - 1] += count.min(clip);
                totals[n - 1] += count;
            }
        }
    }

    let mut precisions = [T::zero(); MAX_ORDER];
    let mut log_sum = T::zero();
    let mut populated = 0usize;
    let mut zero_match = false;
    for n in 0..MAX_ORDER {
        if totals[n] == 0 {
            continue;
        }
        populated += 1;
        let total = T::from_count(totals[n]);
        precisions[n] = T::from_count(matches[n]) / total;
        let numerator = match (matches[n], smoothing) {
            (0, Smoothing::Epsilon(eps)) => eps,
            (0, Smoothing::None) => {
                zero_match = true;
                continue;
            }
            (m, _) => T::from_count(m),
        };
        log_sum = log_sum + (numerator / total).ln();
    }

    let brevity_penalty = if ref_length == 0 {
        // no reference tokens anywhere: nothing to be brief against
        T::one()
    } else {
        brevity_penalty(hyp_length, ref_length)?
    };
    let score = if populated == 0 || zero_match {
        T::zero()
    } else {
        T::lit(100.0) * brevity_penalty * (log_sum / T::from_count(populated as u64)).exp()
    };
    Ok(BleuScore {
        score,
        precisions,
        matches,
        totals,
        brevity_penalty,
        hyp_length,
        ref_length,
    })
}
