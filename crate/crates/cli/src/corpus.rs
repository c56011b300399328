//! Corpus files.
//!
//! `tsv-pairs`: one `source<TAB>target` pair per line, exactly one tab.
//! `mono`: one sentence per line.
//!
//! Both are UTF-8 with LF or CRLF endings. Parsing keeps each line's ending
//! and the text after the tab untouched, so rendering a parsed file
//! reproduces it byte for byte.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusFormat {
    #[default]
    TsvPairs,
    Mono,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv-pairs" => Ok(Self::TsvPairs),
            "mono" => Ok(Self::Mono),
            other => Err(format!("unknown corpus format {other:?} (expected tsv-pairs or mono)")),
        }
    }
}

impl fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TsvPairs => "tsv-pairs",
            Self::Mono => "mono",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub source: String,
    pub target: Option<String>,
    /// `"\n"`, `"\r\n"`, or empty for a last line without terminator.
    pub ending: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusFile {
    pub format: CorpusFormat,
    pub records: Vec<Record>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub tabs: usize,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: expected exactly one tab, found {}", self.line, self.tabs)
    }
}

impl CorpusFile {
    pub fn parse(text: &str, format: CorpusFormat) -> Result<Self, LineError> {
        let mut records = Vec::new();
        for (i, raw) in text.split_inclusive('\n').enumerate() {
            let (body, ending) = if let Some(b) = raw.strip_suffix("\r\n") {
                (b, "\r\n")
            } else if let Some(b) = raw.strip_suffix('\n') {
                (b, "\n")
            } else {
                (raw, "")
            };
            let record = match format {
                CorpusFormat::Mono => Record {
                    source: body.to_owned(),
                    target: None,
                    ending: ending.to_owned(),
                },
                CorpusFormat::TsvPairs => {
                    let tabs = body.matches('\t').count();
                    if tabs != 1 {
                        return Err(LineError { line: i + 1, tabs });
                    }
                    let (source, target) = body.split_once('\t').expect("one tab");
                    Record {
                        source: source.to_owned(),
                        target: Some(target.to_owned()),
                        ending: ending.to_owned(),
                    }
                }
            };
            records.push(record);
        }
        Ok(Self { format, records })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.source);
            if let Some(t) = &r.target {
                out.push('\t');
                out.push_str(t);
            }
            out.push_str(&r.ending);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.source.as_str())
    }

    /// Target side, one entry per record; empty for `mono`.
    pub fn targets(&self) -> Vec<&str> {
        self.records.iter().filter_map(|r| r.target.as_deref()).collect()
    }
}
