//! One function per subcommand. Each takes fully resolved options, so the
//! binary, the tests, and other callers share the same code path.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use colloq_core::augment::{transform_corpus_with_workers, AugmentationConfig, ParallelPair, TransformReport};
use colloq_core::bleu::{corpus_bleu_with, BleuScore, Smoothing};
use colloq_core::bpe::{learn_bpe_detailed, segment_corpus, segmented_line, BpeModel, DEFAULT_END_MARKER};
use colloq_core::lexicon::{Lexicon, LexiconError};
use colloq_core::num::to_real;
use colloq_core::stats::{basic_stats, oov_rate, transformed_percentage, NgramConfig, NgramModel, Vocabulary};
use colloq_core::text::{respell, tokenize};
use colloq_core::{CorpusStats, Sentence};
use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusFile, CorpusFormat};
use crate::error::{CliError, Result};
use crate::filter::{filter_min_tokens, FilterCounts};
use crate::fsio::{self, check_writable, read_text};
use crate::manifest::{sidecar, Manifest};
use crate::pretok::pretokenize_13a_style;

pub const DEFAULT_MERGES: usize = 30_000;
pub const DEFAULT_LM_ORDER: usize = 3;
pub const DEFAULT_LM_K: f64 = 0.1;

fn load_corpus(path: &Path, format: CorpusFormat) -> Result<(CorpusFile, Vec<u8>)> {
    let text = read_text(path)?;
    let corpus = CorpusFile::parse(&text, format).map_err(|e| CliError::format(path, e.to_string()))?;
    Ok((corpus, text.into_bytes()))
}

fn load_lexicon(path: &Path) -> Result<(Lexicon, Vec<u8>)> {
    let text = read_text(path)?;
    let lexicon = Lexicon::parse(&text).map_err(|e| match e {
        LexiconError::Parse { .. } => CliError::format(path, e.to_string()),
        other => CliError::validation(format!("{}: {other}", path.display())),
    })?;
    Ok((lexicon, text.into_bytes()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<Vec<u8>> {
    let mut json = serde_json::to_string_pretty(value).expect("report serializes");
    json.push('\n');
    fsio::write_atomic(path, json.as_bytes())?;
    Ok(json.into_bytes())
}

// ---------------------------------------------------------------- augment

#[derive(Debug, Clone)]
pub struct AugmentOptions {
    pub input: PathBuf,
    pub format: CorpusFormat,
    pub lexicon: PathBuf,
    pub threshold: f64,
    pub seed: u64,
    pub preserve_casing: bool,
    pub output: PathBuf,
    /// Defaults to `<output>.report.json`.
    pub report: Option<PathBuf>,
    /// Defaults to `<output>.manifest.json`.
    pub manifest: Option<PathBuf>,
    pub force: bool,
    /// Worker partitions; defaults to the number of cores.
    pub workers: Option<usize>,
}

/// The transform report as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tokens_total: u64,
    pub tokens_matched: u64,
    pub tokens_transformed: u64,
    /// Transformed tokens as a percentage of all tokens; absent for a corpus
    /// without tokens.
    pub transformed_pct: Option<f64>,
    pub threshold: f64,
    pub master_seed: u64,
}

impl ReportDocument {
    pub fn new(report: &TransformReport, threshold: f64, master_seed: u64) -> Self {
        Self {
            tokens_total: report.tokens_total,
            tokens_matched: report.tokens_matched,
            tokens_transformed: report.tokens_transformed,
            transformed_pct: transformed_percentage(report).ok().map(|f| 100.0 * to_real::<f64>(f)),
            threshold,
            master_seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AugmentOutcome {
    pub report: TransformReport,
    pub document: ReportDocument,
    pub manifest: Manifest,
}

pub fn run_augment(opts: &AugmentOptions) -> Result<AugmentOutcome> {
    let report_path = opts
        .report
        .clone()
        .unwrap_or_else(|| sidecar(&opts.output, "report.json"));
    let manifest_path = opts
        .manifest
        .clone()
        .unwrap_or_else(|| sidecar(&opts.output, "manifest.json"));
    check_writable(&[&opts.output, &report_path, &manifest_path], opts.force)?;

    let config = AugmentationConfig::new(opts.threshold, opts.seed)
        .map_err(|e| CliError::validation(e.to_string()))?
        .with_preserve_casing(opts.preserve_casing);
    let mut manifest = Manifest::start("augment");
    let (corpus, corpus_bytes) = load_corpus(&opts.input, opts.format)?;
    let (lexicon, lexicon_bytes) = load_lexicon(&opts.lexicon)?;
    manifest.input("input", &opts.input, &corpus_bytes);
    manifest.input("lexicon", &opts.lexicon, &lexicon_bytes);

    let pairs: Vec<ParallelPair> = corpus
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| ParallelPair::new(i as u64, tokenize(&r.source), r.target.clone().unwrap_or_default()))
        .collect();
    let workers = opts
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let (augmented, report) = transform_corpus_with_workers(&pairs, &lexicon, &config, workers)
        .map_err(|e| CliError::validation(e.to_string()))?;

    let mut out = corpus.clone();
    for ((record, pair), counts) in out.records.iter_mut().zip(&augmented).zip(&report.per_pair) {
        if counts.transformed > 0 {
            record.source = respell(&record.source, &pair.source).expect("substitution keeps token counts");
        }
    }
    let rendered = out.render();
    fsio::write_atomic(&opts.output, rendered.as_bytes())?;
    manifest.output("output", &opts.output, rendered.as_bytes());

    let document = ReportDocument::new(&report, opts.threshold, opts.seed);
    let report_bytes = write_json(&report_path, &document)?;
    manifest.output("report", &report_path, &report_bytes);

    manifest.master_seed = Some(opts.seed);
    manifest.threshold = Some(opts.threshold);
    manifest.param("format", opts.format.to_string());
    manifest.param("preserve_casing", opts.preserve_casing);
    let manifest = manifest.finish(&manifest_path)?;
    Ok(AugmentOutcome {
        report,
        document,
        manifest,
    })
}

// ----------------------------------------------------------------- filter

#[derive(Debug, Clone)]
pub struct FilterOptions {
    pub input: PathBuf,
    pub format: CorpusFormat,
    pub min_tokens: usize,
    pub output: PathBuf,
    pub manifest: Option<PathBuf>,
    pub force: bool,
}

pub fn run_filter(opts: &FilterOptions) -> Result<(FilterCounts, Manifest)> {
    let manifest_path = opts
        .manifest
        .clone()
        .unwrap_or_else(|| sidecar(&opts.output, "manifest.json"));
    check_writable(&[&opts.output, &manifest_path], opts.force)?;
    let mut manifest = Manifest::start("filter");
    let (corpus, bytes) = load_corpus(&opts.input, opts.format)?;
    manifest.input("input", &opts.input, &bytes);
    let (kept, counts) = filter_min_tokens(&corpus, opts.min_tokens)?;
    let rendered = kept.render();
    fsio::write_atomic(&opts.output, rendered.as_bytes())?;
    manifest.output("output", &opts.output, rendered.as_bytes());
    manifest.param("format", opts.format.to_string());
    manifest.param("min_tokens", opts.min_tokens);
    manifest.param("kept", counts.kept);
    manifest.param("dropped", counts.dropped);
    Ok((counts, manifest.finish(&manifest_path)?))
}

// ------------------------------------------------------------------ stats

#[derive(Debug, Clone)]
pub struct StatsOptions {
    pub inputs: Vec<PathBuf>,
    pub format: CorpusFormat,
    pub vocab: Option<PathBuf>,
    /// Require an OOV column even if no vocabulary was named.
    pub oov: bool,
    /// Corpus the language model is trained on; no perplexity without it.
    pub lm_train: Option<PathBuf>,
    pub lm_format: CorpusFormat,
    pub lm_order: usize,
    pub lm_k: f64,
    pub report: Option<PathBuf>,
    pub force: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub source: String,
    #[serde(flatten)]
    pub stats: CorpusStats,
}

fn sentences(corpus: &CorpusFile) -> Vec<Sentence> {
    corpus.sources().map(tokenize).collect()
}

fn row_label(path: &Path) -> String {
    path.file_stem()
        .or_else(|| path.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn run_stats(opts: &StatsOptions) -> Result<Vec<StatsRow>> {
    if opts.oov && opts.vocab.is_none() {
        return Err(CliError::validation("OOV rate requested but no --vocab given"));
    }
    if let Some(report) = &opts.report {
        check_writable(&[report], opts.force)?;
    }
    let vocab = match &opts.vocab {
        Some(p) => Some(Vocabulary::parse(&read_text(p)?)),
        None => None,
    };
    let model = match &opts.lm_train {
        Some(p) => {
            let (train, _) = load_corpus(p, opts.lm_format)?;
            let config = NgramConfig {
                order: opts.lm_order,
                k: opts.lm_k,
                unk_singletons: false,
            };
            Some(NgramModel::train(&sentences(&train), &config).map_err(|e| CliError::validation(e.to_string()))?)
        }
        None => None,
    };

    let mut rows = Vec::with_capacity(opts.inputs.len());
    for path in &opts.inputs {
        let (corpus, _) = load_corpus(path, opts.format)?;
        let corpus = sentences(&corpus);
        let mut stats: CorpusStats = basic_stats(&corpus);
        if let Some(vocab) = &vocab {
            stats.oov_rate = oov_rate(&corpus, vocab).ok().map(to_real);
        }
        if let Some(model) = &model {
            stats.perplexity = model.perplexity(&corpus).ok();
        }
        rows.push(StatsRow {
            source: row_label(path),
            stats,
        });
    }
    if let Some(report) = &opts.report {
        write_json(report, &rows)?;
    }
    Ok(rows)
}

/// Renders rows under the column headings of the corpus overview table.
pub fn render_stats_table(rows: &[StatsRow]) -> String {
    const HEAD: [&str; 6] = ["Source", "Sentences", "Total Words", "OOV", "AVG Token / Sent", "PPL"];
    let dash = || "-".to_owned();
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            let s = &r.stats;
            [
                r.source.clone(),
                s.sentences.to_string(),
                s.total_tokens.to_string(),
                s.oov_rate.map_or_else(dash, |v| format!("{:.1}%", 100.0 * v)),
                s.avg_tokens_per_sentence.map_or_else(dash, |v| format!("{v:.1}")),
                s.perplexity.map_or_else(dash, |v| format!("{v:.1}")),
            ]
        })
        .collect();
    let mut widths = HEAD.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cols: &[String]| {
        let mut l = String::new();
        for (i, (c, w)) in cols.iter().zip(widths).enumerate() {
            if i == 0 {
                let _ = write!(l, "{c:<w$}");
            } else {
                let _ = write!(l, "  {c:>w$}");
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(&HEAD.map(str::to_owned));
    for row in &cells {
        line(row);
    }
    out
}

// -------------------------------------------------------------------- bpe

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    #[default]
    Source,
    Target,
    Both,
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "source" => Ok(Self::Source),
            "target" => Ok(Self::Target),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown side {other:?} (expected source, target or both)")),
        }
    }
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Self::Source => "source",
            Self::Target => "target",
            Self::Both => "both",
        }
    }

    fn source(self) -> bool {
        matches!(self, Self::Source | Self::Both)
    }

    fn target(self) -> bool {
        matches!(self, Self::Target | Self::Both)
    }
}

fn side_sentences(corpus: &CorpusFile, side: Side) -> Vec<Sentence> {
    let mut out = Vec::new();
    for r in &corpus.records {
        if side.source() {
            out.push(tokenize(&r.source));
        }
        if side.target() {
            if let Some(t) = &r.target {
                out.push(tokenize(t));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct BpeLearnOptions {
    pub input: PathBuf,
    pub format: CorpusFormat,
    pub side: Side,
    pub merges: usize,
    pub output: PathBuf,
    pub manifest: Option<PathBuf>,
    pub force: bool,
}

pub fn run_bpe_learn(opts: &BpeLearnOptions) -> Result<(BpeModel, Manifest)> {
    let manifest_path = opts
        .manifest
        .clone()
        .unwrap_or_else(|| sidecar(&opts.output, "manifest.json"));
    check_writable(&[&opts.output, &manifest_path], opts.force)?;
    let mut manifest = Manifest::start("bpe-learn");
    let (corpus, bytes) = load_corpus(&opts.input, opts.format)?;
    manifest.input("input", &opts.input, &bytes);
    let learned = learn_bpe_detailed(&side_sentences(&corpus, opts.side), opts.merges, DEFAULT_END_MARKER)
        .map_err(|e| CliError::validation(e.to_string()))?;
    let text = learned.model.to_merge_file();
    fsio::write_atomic(&opts.output, text.as_bytes())?;
    manifest.output("merges", &opts.output, text.as_bytes());
    manifest.param("format", opts.format.to_string());
    manifest.param("side", opts.side.name());
    manifest.param("merges_requested", opts.merges);
    manifest.param("merges_learned", learned.model.merge_count());
    Ok((learned.model, manifest.finish(&manifest_path)?))
}

#[derive(Debug, Clone)]
pub struct BpeApplyOptions {
    pub model: PathBuf,
    pub input: PathBuf,
    pub format: CorpusFormat,
    pub side: Side,
    pub output: PathBuf,
    pub manifest: Option<PathBuf>,
    pub force: bool,
}

pub fn run_bpe_apply(opts: &BpeApplyOptions) -> Result<Manifest> {
    let manifest_path = opts
        .manifest
        .clone()
        .unwrap_or_else(|| sidecar(&opts.output, "manifest.json"));
    check_writable(&[&opts.output, &manifest_path], opts.force)?;
    let mut manifest = Manifest::start("bpe-apply");
    let model_text = read_text(&opts.model)?;
    let model = BpeModel::from_merge_file(&model_text).map_err(|e| CliError::format(&opts.model, e.to_string()))?;
    let (corpus, bytes) = load_corpus(&opts.input, opts.format)?;
    manifest.input("merges", &opts.model, model_text.as_bytes());
    manifest.input("input", &opts.input, &bytes);

    let segment = |text: &str| segmented_line(&segment_corpus(&model, &[tokenize(text)])[0]);
    let mut out = corpus.clone();
    for r in &mut out.records {
        if opts.side.source() {
            r.source = segment(&r.source);
        }
        if opts.side.target() {
            if let Some(t) = r.target.as_mut() {
                *t = segment(t);
            }
        }
    }
    let rendered = out.render();
    fsio::write_atomic(&opts.output, rendered.as_bytes())?;
    manifest.output("output", &opts.output, rendered.as_bytes());
    manifest.param("format", opts.format.to_string());
    manifest.param("side", opts.side.name());
    manifest.finish(&manifest_path)
}

// ------------------------------------------------------------------ score

#[derive(Debug, Clone)]
pub struct ScoreOptions {
    pub hypotheses: PathBuf,
    pub references: PathBuf,
    pub smooth_epsilon: Option<f64>,
    pub report: Option<PathBuf>,
    pub force: bool,
}

fn pretokenized_lines(path: &Path) -> Result<Vec<Vec<String>>> {
    let (corpus, _) = load_corpus(path, CorpusFormat::Mono)?;
    Ok(corpus.sources().map(pretokenize_13a_style).collect())
}

pub fn run_score(opts: &ScoreOptions) -> Result<BleuScore<f64>> {
    if let Some(report) = &opts.report {
        check_writable(&[report], opts.force)?;
    }
    let hyps = pretokenized_lines(&opts.hypotheses)?;
    let refs = pretokenized_lines(&opts.references)?;
    let smoothing = match opts.smooth_epsilon {
        Some(eps) if eps > 0.0 && eps.is_finite() => Smoothing::Epsilon(eps),
        Some(eps) => {
            return Err(CliError::validation(format!(
                "smoothing epsilon must be positive, got {eps}"
            )))
        }
        None => Smoothing::None,
    };
    let score = corpus_bleu_with(&hyps, &refs, smoothing).map_err(|e| CliError::validation(e.to_string()))?;
    if let Some(report) = &opts.report {
        write_json(report, &score)?;
    }
    Ok(score)
}

// ---------------------------------------------------------- dict-validate

#[derive(Debug, Clone)]
pub struct DictReport {
    pub entries: usize,
    pub problems: Vec<LexiconError>,
}

impl DictReport {
    /// 0 when clean; the format code if any line failed to parse, else the
    /// validation code.
    pub fn exit_code(&self) -> i32 {
        use crate::error::exit;
        if self.problems.iter().any(|p| matches!(p, LexiconError::Parse { .. })) {
            exit::FORMAT
        } else if self.problems.is_empty() {
            exit::OK
        } else {
            exit::VALIDATION
        }
    }
}

pub fn run_dict_validate(path: &Path) -> Result<DictReport> {
    let text = read_text(path)?;
    let (lexicon, problems) = Lexicon::parse_collecting(&text);
    Ok(DictReport {
        entries: lexicon.len(),
        problems,
    })
}
