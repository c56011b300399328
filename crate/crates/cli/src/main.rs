use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use colloq_cli::commands::{
    self, render_stats_table, AugmentOptions, BpeApplyOptions, BpeLearnOptions, FilterOptions, ScoreOptions, Side,
    StatsOptions,
};
use colloq_cli::config::Config;
use colloq_cli::error::exit;
use colloq_cli::filter::DEFAULT_MIN_TOKENS;
use colloq_cli::{CliError, CorpusFormat};

#[derive(Parser)]
#[command(name = "colloq", version, about = "Colloquial-style augmentation and corpus metrics")]
struct Cli {
    /// TOML file whose keys mirror the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replace dictionary words with colloquial variants at a given threshold.
    Augment(AugmentArgs),
    /// Corpus statistics: sentences, tokens, OOV rate, average length, perplexity.
    Stats(StatsArgs),
    /// Drop pairs whose source side is shorter than --min-tokens.
    Filter(FilterArgs),
    /// Learn byte-pair-encoding merges.
    BpeLearn(BpeLearnArgs),
    /// Segment a corpus with learned merges.
    BpeApply(BpeApplyArgs),
    /// Corpus BLEU of hypotheses against references.
    Score(ScoreArgs),
    /// Check a lexicon file and report every problem line.
    DictValidate(DictValidateArgs),
}

#[derive(Args)]
struct Common {
    /// Corpus format: tsv-pairs or mono.
    #[arg(long)]
    format: Option<CorpusFormat>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overwrite existing outputs.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct AugmentArgs {
    input: PathBuf,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Replacement probability for each dictionary word, in [0, 1].
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write replacements in lowercase instead of copying the original casing.
    #[arg(long)]
    no_preserve_casing: bool,
    #[arg(long)]
    workers: Option<usize>,
    /// Transform report path (default: <output>.report.json).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Manifest path (default: <output>.manifest.json).
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    format: Option<CorpusFormat>,
    /// Reference word list, one word per line.
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Fail unless an OOV rate can be computed.
    #[arg(long)]
    oov: bool,
    /// Train the perplexity model on this corpus.
    #[arg(long)]
    lm_train: Option<PathBuf>,
    #[arg(long)]
    lm_format: Option<CorpusFormat>,
    #[arg(long)]
    lm_order: Option<usize>,
    #[arg(long)]
    lm_k: Option<f64>,
    /// Also write the statistics as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct FilterArgs {
    input: PathBuf,
    #[arg(long)]
    min_tokens: Option<usize>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BpeLearnArgs {
    input: PathBuf,
    #[arg(long)]
    merges: Option<usize>,
    /// Which side of a tsv-pairs corpus to learn from: source, target or both.
    #[arg(long)]
    side: Option<Side>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BpeApplyArgs {
    input: PathBuf,
    /// Merge file written by bpe-learn.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    side: Option<Side>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ScoreArgs {
    /// Hypotheses, one sentence per line.
    #[arg(long = "hyp")]
    hypotheses: PathBuf,
    /// References, aligned with the hypotheses.
    #[arg(long = "ref")]
    references: PathBuf,
    /// Replace zero n-gram matches with this value.
    #[arg(long)]
    smooth_epsilon: Option<f64>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct DictValidateArgs {
    lexicon: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Cli(CliError),
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Self::Cli(e)
    }
}

fn required<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, Failure> {
    flag.or(file)
        .ok_or_else(|| Failure::Usage(format!("missing --{name} (flag or config key)")))
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let format = |flag: Option<CorpusFormat>| flag.or(cfg.format).unwrap_or_default();
    let force = |flag: bool| flag || cfg.force.unwrap_or(false);

    match cli.command {
        Command::Augment(a) => {
            let opts = AugmentOptions {
                input: a.input,
                format: format(a.common.format),
                lexicon: required(a.lexicon, cfg.lexicon.clone(), "lexicon")?,
                threshold: required(a.threshold, cfg.threshold, "threshold")?,
                seed: required(a.seed, cfg.seed, "seed")?,
                preserve_casing: !a.no_preserve_casing && cfg.preserve_casing.unwrap_or(true),
                output: required(a.common.output, cfg.output.clone(), "output")?,
                report: a.report.or(cfg.report.clone()),
                manifest: a.manifest,
                force: force(a.common.force),
                workers: a.workers.or(cfg.workers),
            };
            let outcome = commands::run_augment(&opts)?;
            print_json(&outcome.document);
        }
        Command::Stats(a) => {
            let opts = StatsOptions {
                inputs: a.inputs,
                format: format(a.format),
                vocab: a.vocab.or(cfg.vocab.clone()),
                oov: a.oov,
                lm_train: a.lm_train.or(cfg.lm_train.clone()),
                lm_format: a.lm_format.or(cfg.lm_format).unwrap_or(CorpusFormat::Mono),
                lm_order: a.lm_order.or(cfg.lm_order).unwrap_or(commands::DEFAULT_LM_ORDER),
                lm_k: a.lm_k.or(cfg.lm_k).unwrap_or(commands::DEFAULT_LM_K),
                report: a.report.or(cfg.report.clone()),
                force: force(a.force),
            };
            let rows = commands::run_stats(&opts)?;
            print!("{}", render_stats_table(&rows));
        }
        Command::Filter(a) => {
            let opts = FilterOptions {
                input: a.input,
                format: format(a.common.format),
                min_tokens: a.min_tokens.or(cfg.min_tokens).unwrap_or(DEFAULT_MIN_TOKENS),
                output: required(a.common.output, cfg.output.clone(), "output")?,
                manifest: a.manifest,
                force: force(a.common.force),
            };
            let (counts, _) = commands::run_filter(&opts)?;
            print_json(&counts);
        }
        Command::BpeLearn(a) => {
            let opts = BpeLearnOptions {
                input: a.input,
                format: format(a.common.format),
                side: a.side.or(cfg.side).unwrap_or_default(),
                merges: a.merges.or(cfg.merges).unwrap_or(commands::DEFAULT_MERGES),
                output: required(a.common.output, cfg.output.clone(), "output")?,
                manifest: a.manifest,
                force: force(a.common.force),
            };
            let (model, _) = commands::run_bpe_learn(&opts)?;
            eprintln!("learned {} merges", model.merge_count());
        }
        Command::BpeApply(a) => {
            let opts = BpeApplyOptions {
                model: a.model,
                input: a.input,
                format: format(a.common.format),
                side: a.side.or(cfg.side).unwrap_or_default(),
                output: required(a.common.output, cfg.output.clone(), "output")?,
                manifest: a.manifest,
                force: force(a.common.force),
            };
            commands::run_bpe_apply(&opts)?;
        }
        Command::Score(a) => {
            let opts = ScoreOptions {
                hypotheses: a.hypotheses,
                references: a.references,
                smooth_epsilon: a.smooth_epsilon.or(cfg.smooth_epsilon),
                report: a.report.or(cfg.report.clone()),
                force: force(a.force),
            };
            let score = commands::run_score(&opts)?;
            print_json(&score);
            println!("{}", score.summary());
        }
        Command::DictValidate(a) => {
            let path = required(a.lexicon, cfg.lexicon.clone(), "lexicon")?;
            let report = commands::run_dict_validate(&path)?;
            for p in &report.problems {
                println!("{}: {p}", path.display());
            }
            println!("{} entries, {} problems", report.entries, report.problems.len());
            return Ok(report.exit_code());
        }
    }
    Ok(exit::OK)
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            exit::USAGE
        }
        Err(Failure::Cli(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
