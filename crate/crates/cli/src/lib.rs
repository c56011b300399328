//! File formats and commands behind the `colloq` binary: filter → augment →
//! stats → bpe → score, each writing a manifest with content digests.

pub mod commands;
pub mod config;
pub mod corpus;
pub mod error;
pub mod filter;
pub mod fsio;
pub mod manifest;
pub mod pretok;

pub use crate::corpus::{CorpusFile, CorpusFormat};
pub use crate::error::{CliError, Result};
pub use crate::filter::filter_min_tokens;
pub use crate::manifest::Manifest;
pub use crate::pretok::pretokenize_13a_style;
