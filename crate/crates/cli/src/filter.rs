//! Minimum-length filtering on the source side.

use colloq_core::text::tokenize;
use serde::Serialize;

use crate::corpus::CorpusFile;
use crate::error::{CliError, Result};

pub const DEFAULT_MIN_TOKENS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FilterCounts {
    pub kept: usize,
    pub dropped: usize,
}

/// Keeps records whose source has at least `min_tokens` tokens (a sentence
/// is dropped when it is shorter). Pairs are kept or dropped whole, in order.
pub fn filter_min_tokens(corpus: &CorpusFile, min_tokens: usize) -> Result<(CorpusFile, FilterCounts)> {
    if min_tokens == 0 {
        return Err(CliError::validation("--min-tokens must be at least 1"));
    }
    let records: Vec<_> = corpus
        .records
        .iter()
        .filter(|r| tokenize(&r.source).len() >= min_tokens)
        .cloned()
        .collect();
    let counts = FilterCounts {
        kept: records.len(),
        dropped: corpus.len() - records.len(),
    };
    Ok((
        CorpusFile {
            format: corpus.format,
            records,
        },
        counts,
    ))
}
