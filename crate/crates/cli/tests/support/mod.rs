//! Independent reference implementations and fixtures shared by the
//! integration tests. Nothing here calls into the library code it checks.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn colloq() -> Command {
    Command::new(env!("CARGO_BIN_EXE_colloq"))
}

pub fn run(args: &[&str]) -> Output {
    colloq().args(args).output().expect("spawn colloq")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

pub fn sha256_file(path: &Path) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(std::fs::read(path).expect("read output")))
}

// ------------------------------------------------------------------ BLEU

fn count_in(tokens: &[&str], gram: &[&str]) -> u64 {
    if gram.len() > tokens.len() {
        return 0;
    }
    (0..=tokens.len() - gram.len())
        .filter(|&i| &tokens[i..i + gram.len()] == gram)
        .count() as u64
}

/// Corpus BLEU-4 by direct enumeration: every distinct hypothesis n-gram is
/// counted by rescanning both sentences.
pub fn brute_force_bleu(hyps: &[Vec<&str>], refs: &[Vec<&str>]) -> f64 {
    let mut matches = [0u64; 4];
    let mut totals = [0u64; 4];
    let (mut h_len, mut r_len) = (0u64, 0u64);
    for (h, r) in hyps.iter().zip(refs) {
        h_len += h.len() as u64;
        r_len += r.len() as u64;
        for n in 1..=4 {
            if h.len() < n {
                continue;
            }
            for i in 0..=h.len() - n {
                let gram = &h[i..i + n];
                totals[n - 1] += 1;
                let seen_before = (0..i).any(|j| &h[j..j + n] == gram);
                if !seen_before {
                    matches[n - 1] += count_in(h, gram).min(count_in(r, gram));
                }
            }
        }
    }
    let populated: Vec<usize> = (0..4).filter(|&n| totals[n] > 0).collect();
    if populated.is_empty() || populated.iter().any(|&n| matches[n] == 0) {
        return 0.0;
    }
    let product: f64 = populated
        .iter()
        .map(|&n| matches[n] as f64 / totals[n] as f64)
        .product();
    let bp = if r_len == 0 || h_len >= r_len {
        1.0
    } else {
        (1.0 - r_len as f64 / h_len as f64).exp()
    };
    100.0 * bp * product.powf(1.0 / populated.len() as f64)
}

// ------------------------------------------------------------------- BPE

pub struct OracleBpe {
    pub merges: Vec<(String, String)>,
    pub segmentations: Vec<(String, Vec<String>)>,
}

/// Greedy BPE that recounts every adjacent pair from scratch before each
/// merge. Ties go to the lexicographically smallest pair; learning stops when
/// the best pair occurs fewer than twice.
pub fn recount_bpe(word_freqs: &[(String, u64)], num_merges: usize, marker: &str) -> OracleBpe {
    let mut words: Vec<(Vec<String>, u64)> = word_freqs
        .iter()
        .map(|(w, f)| {
            let mut symbols: Vec<String> = w.chars().map(String::from).collect();
            symbols.push(marker.to_owned());
            (symbols, *f)
        })
        .collect();
    let mut merges = Vec::new();
    while merges.len() < num_merges {
        let mut counts: Vec<((String, String), u64)> = Vec::new();
        for (symbols, f) in &words {
            for w in symbols.windows(2) {
                let key = (w[0].clone(), w[1].clone());
                match counts.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, c)) => *c += f,
                    None => counts.push((key, *f)),
                }
            }
        }
        let Some(best) = counts
            .iter()
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
            .cloned()
        else {
            break;
        };
        if best.1 < 2 {
            break;
        }
        let (left, right) = best.0;
        for (symbols, _) in &mut words {
            let mut out = Vec::new();
            let mut i = 0;
            while i < symbols.len() {
                if i + 1 < symbols.len() && symbols[i] == left && symbols[i + 1] == right {
                    out.push(format!("{left}{right}"));
                    i += 2;
                } else {
                    out.push(symbols[i].clone());
                    i += 1;
                }
            }
            *symbols = out;
        }
        merges.push((left, right));
    }
    OracleBpe {
        merges,
        segmentations: word_freqs
            .iter()
            .zip(words)
            .map(|((w, _), (symbols, _))| (w.clone(), symbols))
            .collect(),
    }
}

// ------------------------------------------------------------- fixtures

pub const LEXICON_TSV: &str = "\
# formal -> colloquial
tidak\tgak,nggak,ga
saya\taku,gue
kamu\tlo,lu
sudah\tudah,dah
belum\tblm
sedang\tlagi
bagaimana\tgimana,gmn
mengapa\tkenapa,knp
begitu\tgitu
sangat\tbanget
hanya\tcuma,cuman
memang\temang
ayo\tkuy,yuk
tahu\ttau
";

pub const FILLER: &[&str] = &[
    "makan", "rumah", "pergi", "pasar", "buku", "air", "jalan", "kota", "anak", "orang", "hari", "malam", "pagi",
    "kerja", "sekolah", "teman", "di", "ke", "dari", "yang", "dan", "itu", "ini", "untuk", "dengan", "baru",
];

pub fn lexicon_keys() -> Vec<&'static str> {
    LEXICON_TSV
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split('\t').next().unwrap())
        .collect()
}

pub struct Synthetic {
    pub text: String,
    pub total_tokens: u64,
    pub lexicon_tokens: u64,
}

/// A tsv-pairs corpus of at least `min_tokens` source tokens in which
/// lexicon words make up `coverage` of all tokens (rounded to a whole count).
/// Sentences start capitalised, end with an attached full stop, sometimes
/// shout a word, and some lines end in CRLF.
pub fn synthetic_corpus(rng: &mut StdRng, min_tokens: u64, coverage: f64) -> Synthetic {
    let keys = lexicon_keys();
    let mut lengths = Vec::new();
    let mut total = 0u64;
    while total < min_tokens {
        let n = rng.random_range(6..15);
        lengths.push(n);
        total += n as u64 + 1;
    }
    let words: usize = lengths.iter().sum();
    let lexical = (coverage * total as f64).round() as usize;
    let mut slots: Vec<bool> = (0..words).map(|i| i < lexical).collect();
    slots.shuffle(rng);

    let mut text = String::new();
    let mut slot = slots.into_iter();
    for (i, &n) in lengths.iter().enumerate() {
        let mut sentence: Vec<String> = (0..n)
            .map(|_| {
                let w = if slot.next().unwrap() {
                    keys[rng.random_range(0..keys.len())]
                } else {
                    FILLER[rng.random_range(0..FILLER.len())]
                };
                if rng.random_bool(0.03) {
                    w.to_uppercase()
                } else {
                    w.to_owned()
                }
            })
            .collect();
        let first = &mut sentence[0];
        let mut chars = first.chars();
        let head = chars.next().unwrap().to_uppercase().collect::<String>();
        *first = head + chars.as_str();
        let ending = if i % 7 == 3 { "\r\n" } else { "\n" };
        text.push_str(&format!("{}.\tSentence {i} stays, as is.{ending}", sentence.join(" ")));
    }
    Synthetic {
        text,
        total_tokens: total,
        lexicon_tokens: lexical as u64,
    }
}

/// Tokens of a source line as the generator builds them: whitespace chunks,
/// with a trailing full stop counted separately.
pub fn count_tokens_and_lexical(source: &str, keys: &[&str]) -> (u64, u64) {
    let mut tokens = 0;
    let mut lexical = 0;
    for chunk in source.split_whitespace() {
        let word = chunk.strip_suffix('.').unwrap_or(chunk);
        tokens += 1 + u64::from(word.len() != chunk.len());
        if keys.contains(&word.to_lowercase().as_str()) {
            lexical += 1;
        }
    }
    (tokens, lexical)
}

/// Target column of every line, line ending included.
pub fn target_column(text: &str) -> Vec<&str> {
    text.split_inclusive('\n')
        .map(|l| l.split_once('\t').map_or("", |(_, t)| t))
        .collect()
}

pub fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).expect("write fixture");
    p
}
