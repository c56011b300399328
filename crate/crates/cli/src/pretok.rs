//! Pre-tokenizer for BLEU scoring, following the `13a` convention of the
//! common reference scorers.
//!
//! Steps, in order:
//!
//! 1. drop `<skipped>`, join `-\n` line breaks, turn newlines into spaces;
//! 2. unescape `&quot;`, `&amp;`, `&lt;`, `&gt;`;
//! 3. pad every ASCII symbol except `'`, `,`, `-` and `.` with spaces;
//! 4. split `.` and `,` off unless they sit between digits (`3.5` and
//!    `1,000` survive, `Mr.` does not);
//! 5. split `-` off when it follows a digit;
//! 6. split on whitespace.
//!
//! Apostrophes and word-internal hyphens stay attached (`Let's`, `anak-anak`).

use std::sync::LazyLock;

use regex::Regex;

static SYMBOLS: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([{-~\[-` -&(-+:-@/])").expect("valid pattern"));
static PERIOD_COMMA_AFTER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([^0-9])([.,])").expect("valid pattern"));
static PERIOD_COMMA_BEFORE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([.,])([^0-9])").expect("valid pattern"));
static DASH_AFTER_DIGIT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([0-9])(-)").expect("valid pattern"));

pub fn pretokenize_13a_style(line: &str) -> Vec<String> {
    let mut s = line.replace("<skipped>", "").replace("-\n", "").replace('\n', " ");
    if s.contains('&') {
        s = s
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let s = format!(" {s} ");
    let s = SYMBOLS.replace_all(&s, " $1 ");
    let s = PERIOD_COMMA_AFTER.replace_all(&s, "$1 $2 ");
    let s = PERIOD_COMMA_BEFORE.replace_all(&s, " $1 $2");
    let s = DASH_AFTER_DIGIT.replace_all(&s, "$1 $2 ");
    s.split_whitespace().map(str::to_owned).collect()
}
