//! Optional TOML config file. Every key mirrors a command-line flag
//! (dashes become underscores); flags win over file values.
//!
//! ```toml
//! threshold = 0.7
//! seed = 42
//! lexicon = "dict.tsv"
//! format = "tsv-pairs"
//! min_tokens = 5
//! merges = 30000
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::commands::Side;
use crate::corpus::CorpusFormat;
use crate::error::{CliError, Result};
use crate::fsio::read_text;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub threshold: Option<f64>,
    pub seed: Option<u64>,
    pub preserve_casing: Option<bool>,
    pub workers: Option<usize>,
    pub min_tokens: Option<usize>,
    pub merges: Option<usize>,
    pub side: Option<Side>,
    pub lexicon: Option<PathBuf>,
    pub vocab: Option<PathBuf>,
    pub format: Option<CorpusFormat>,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub force: Option<bool>,
    pub lm_train: Option<PathBuf>,
    pub lm_format: Option<CorpusFormat>,
    pub lm_order: Option<usize>,
    pub lm_k: Option<f64>,
    pub smooth_epsilon: Option<f64>,
}

impl Config {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::format(path, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?, path)
    }
}
