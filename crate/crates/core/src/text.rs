//! Tokenization, detokenization and casing.
//!
//! Text is split on whitespace into chunks. On each chunk, the maximal run of
//! leading non-alphanumeric graphemes and the maximal run of trailing ones are
//! detached as punctuation tokens; whatever remains in between (apostrophes,
//! hyphens, dots of a URL) stays inside a single word token. A chunk with no
//! alphanumeric character at all is one punctuation token.
//!
//! Every token remembers whether it was glued to the token before it, so that
//! [`detokenize`] undoes [`tokenize`] up to whitespace normalization.

use std::fmt;

use thiserror::Error;
use unicode_segmentation::UnicodeSegmentation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("token surface is empty")]
    EmptySurface,
    #[error("token surface {0:?} contains whitespace")]
    Whitespace(String),
    #[error("{0:?} is not a word token")]
    NotAWord(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    surface: String,
    kind: TokenKind,
    attached: bool,
}

impl Token {
    /// Builds a token, inferring its kind from the surface.
    ///
    /// Punctuation tokens attach to the preceding token and words do not;
    /// use [`Token::with_attached`] to override.
    pub fn new(surface: impl Into<String>) -> Result<Self, TextError> {
        let surface = surface.into();
        if surface.is_empty() {
            return Err(TextError::EmptySurface);
        }
        if surface.chars().any(char::is_whitespace) {
            return Err(TextError::Whitespace(surface));
        }
        let kind = if surface.chars().any(char::is_alphanumeric) {
            TokenKind::Word
        } else {
            TokenKind::Punctuation
        };
        Ok(Self {
            attached: kind == TokenKind::Punctuation,
            surface,
            kind,
        })
    }

    pub fn with_attached(mut self, attached: bool) -> Self {
        self.attached = attached;
        self
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn kind(&self) -> TokenKind {
        self.kind
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    /// Whether the token is written directly after the previous one.
    pub fn is_attached(&self) -> bool {
        self.attached
    }

    /// Same position and spacing, different surface. The new surface must
    /// itself be a valid single token of the same kind.
    pub fn replace_surface(&self, surface: impl Into<String>) -> Result<Self, TextError> {
        let fresh = Token::new(surface)?;
        if fresh.kind != self.kind {
            return Err(TextError::NotAWord(fresh.surface));
        }
        Ok(Self {
            surface: fresh.surface,
            kind: self.kind,
            attached: self.attached,
        })
    }

    pub fn lowercase(&self) -> String {
        self.surface.to_lowercase()
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Self { tokens }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| t.is_word())
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(Token::surface).collect()
    }
}

impl From<Vec<Token>> for Sentence {
    fn from(tokens: Vec<Token>) -> Self {
        Self::new(tokens)
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&detokenize(self))
    }
}

fn is_alnum_grapheme(g: &str) -> bool {
    g.chars().any(char::is_alphanumeric)
}

fn raw(surface: &str, kind: TokenKind, attached: bool) -> Token {
    Token {
        surface: surface.to_owned(),
        kind,
        attached,
    }
}

pub fn tokenize(text: &str) -> Sentence {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let graphemes: Vec<(usize, &str)> = chunk.grapheme_indices(true).collect();
        let Some(first_alnum) = graphemes.iter().position(|(_, g)| is_alnum_grapheme(g)) else {
            tokens.push(raw(chunk, TokenKind::Punctuation, false));
            continue;
        };
        let last_alnum = graphemes
            .iter()
            .rposition(|(_, g)| is_alnum_grapheme(g))
            .expect("a first alphanumeric grapheme implies a last one");
        let word_start = graphemes[first_alnum].0;
        let (end_idx, end_g) = graphemes[last_alnum];
        let word_end = end_idx + end_g.len();

        if word_start > 0 {
            tokens.push(raw(&chunk[..word_start], TokenKind::Punctuation, false));
        }
        tokens.push(raw(&chunk[word_start..word_end], TokenKind::Word, word_start > 0));
        if word_end < chunk.len() {
            tokens.push(raw(&chunk[word_end..], TokenKind::Punctuation, true));
        }
    }
    Sentence { tokens }
}

pub fn detokenize(sentence: &Sentence) -> String {
    let mut out = String::new();
    for (i, token) in sentence.tokens.iter().enumerate() {
        if i > 0 && !token.attached {
            out.push(' ');
        }
        out.push_str(&token.surface);
    }
    out
}

/// Rewrites `original` with the surfaces of `edited`, a same-length
/// token-for-token edit of `tokenize(original)`. All original whitespace is
/// kept byte for byte. Returns `None` when the token counts differ.
pub fn respell(original: &str, edited: &Sentence) -> Option<String> {
    let before = tokenize(original);
    if before.len() != edited.len() {
        return None;
    }
    let mut out = String::with_capacity(original.len());
    let mut pos = 0;
    for (old, new) in before.tokens.iter().zip(&edited.tokens) {
        let rest = &original[pos..];
        let start = pos + (rest.len() - rest.trim_start().len());
        out.push_str(&original[pos..start]);
        debug_assert!(original[start..].starts_with(old.surface()));
        out.push_str(new.surface());
        pos = start + old.surface().len();
    }
    out.push_str(&original[pos..]);
    Some(out)
}

/// Collapses whitespace runs to one space and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CasingPattern {
    AllLower,
    InitialCapital,
    AllCaps,
    Mixed,
}

/// Classifies the capitalization of a word token.
///
/// A word without cased letters (digits, for instance) is all-lower. A single
/// uppercase letter is initial-capital.
pub fn classify_casing(word: &Token) -> Result<CasingPattern, TextError> {
    if !word.is_word() {
        return Err(TextError::NotAWord(word.surface.clone()));
    }
    Ok(classify_str(&word.surface))
}

pub(crate) fn classify_str(s: &str) -> CasingPattern {
    if s == s.to_lowercase() {
        return CasingPattern::AllLower;
    }
    let mut graphemes = s.graphemes(true);
    let head = graphemes.next().unwrap_or_default();
    let rest = graphemes.as_str();
    if head == head.to_uppercase() && head != head.to_lowercase() && rest == rest.to_lowercase() {
        return CasingPattern::InitialCapital;
    }
    if s == s.to_uppercase() {
        return CasingPattern::AllCaps;
    }
    CasingPattern::Mixed
}

/// Re-applies a casing pattern to a lowercase replacement. Mixed casing
/// cannot be transferred and leaves the replacement unchanged.
pub fn apply_casing(pattern: CasingPattern, replacement: &str) -> String {
    match pattern {
        CasingPattern::AllLower | CasingPattern::Mixed => replacement.to_owned(),
        CasingPattern::AllCaps => replacement.to_uppercase(),
        CasingPattern::InitialCapital => {
            let mut graphemes = replacement.graphemes(true);
            match graphemes.next() {
                Some(head) => {
                    let mut out = head.to_uppercase();
                    out.push_str(graphemes.as_str());
                    out
                }
                None => String::new(),
            }
        }
    }
}
