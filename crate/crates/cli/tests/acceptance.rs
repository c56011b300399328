//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the verdicts are always printed.

mod support;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use colloq_core::augment::transform_sentence;
use colloq_core::bleu::corpus_bleu;
use colloq_core::bpe::{desegment_line, learn_bpe, learn_bpe_detailed, segmented_line};
use colloq_core::stats::{oov_rate, train_ngram, NgramConfig, NgramModel, Vocabulary};
use colloq_core::text::tokenize;
use colloq_core::{AugmentationConfig, BleuScore, Fraction, Lexicon, PairRng, Sentence};
use rand::rngs::StdRng;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use serde_json::Value;
use support::*;
use tempfile::TempDir;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Fixture {
    dir: TempDir,
    corpus: Synthetic,
    input: std::path::PathBuf,
    lexicon: std::path::PathBuf,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().expect("tempdir");
    let corpus = synthetic_corpus(&mut StdRng::seed_from_u64(2024), 50_000, 0.238);
    let input = write(dir.path(), "corpus.tsv", &corpus.text);
    let lexicon = write(dir.path(), "lexicon.tsv", LEXICON_TSV);
    Fixture {
        dir,
        corpus,
        input,
        lexicon,
    }
}

fn augment(
    fx: &Fixture,
    theta: f64,
    seed: u64,
    workers: usize,
    name: &str,
) -> Result<(Value, std::path::PathBuf), String> {
    let out = fx.dir.path().join(name);
    let output = run(&[
        "augment",
        path_str(&fx.input),
        "--lexicon",
        path_str(&fx.lexicon),
        "--threshold",
        &theta.to_string(),
        "--seed",
        &seed.to_string(),
        "--workers",
        &workers.to_string(),
        "--output",
        path_str(&out),
        "--force",
    ]);
    if !output.status.success() {
        return Err(format!(
            "augment exited {:?}: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        ));
    }
    let report: Value = serde_json::from_slice(&std::fs::read(format!("{}.report.json", out.display())).unwrap())
        .map_err(|e| e.to_string())?;
    Ok((report, out))
}

fn criterion_1(fx: &Fixture) -> Verdict {
    let expected = [(0.3, 7.1), (0.5, 11.9), (0.7, 16.6), (1.0, 23.8)];
    let start = Instant::now();
    let mut pct = Vec::new();
    for (i, (theta, _)) in expected.iter().enumerate() {
        let (report, _) = augment(fx, *theta, 7, 4, &format!("lin{i}.tsv"))?;
        pct.push(report["transformed_pct"].as_f64().ok_or("missing transformed_pct")?);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let full = pct[3];
    for ((theta, want), got) in expected.iter().zip(&pct) {
        ensure((got - want).abs() <= 0.5, || {
            format!("theta {theta}: {got:.3}% vs {want}%")
        })?;
        let ratio = got / full;
        ensure((ratio - theta).abs() <= 0.02, || {
            format!("theta {theta}: ratio {ratio:.4}")
        })?;
    }
    ensure(elapsed < 10.0, || format!("took {elapsed:.2}s"))?;
    let shown: Vec<String> = pct.iter().map(|p| format!("{p:.2}")).collect();
    Ok(format!(
        "{} tokens, transformed-% {} in {elapsed:.2}s",
        fx.corpus.total_tokens,
        shown.join("/")
    ))
}

fn criterion_2(fx: &Fixture) -> Verdict {
    let (_, out) = augment(fx, 0.0, 99, 3, "identity.tsv")?;
    ensure(std::fs::read(&out).unwrap() == fx.corpus.text.as_bytes(), || {
        "theta 0 output differs from input".into()
    })?;

    let keys = lexicon_keys();
    let (total, lexical) = fx
        .corpus
        .text
        .lines()
        .map(|l| count_tokens_and_lexical(l.split('\t').next().unwrap(), &keys))
        .fold((0, 0), |(t, l), (a, b)| (t + a, l + b));
    let coverage = Fraction::new(lexical, total);
    let (report, _) = augment(fx, 1.0, 99, 3, "saturated.tsv")?;
    let transformed = report["tokens_transformed"].as_u64().unwrap();
    ensure(report["tokens_total"].as_u64() == Some(total), || {
        format!("token total {} vs counted {total}", report["tokens_total"])
    })?;
    ensure(coverage * total == Fraction::from(transformed), || {
        format!("theta 1 transformed {transformed}, coverage*total {}", coverage * total)
    })?;
    Ok(format!(
        "theta 0 byte-identical; theta 1 transformed {transformed} = {lexical}/{total} * {total}"
    ))
}

fn criterion_3(fx: &Fixture) -> Verdict {
    let mut rng = StdRng::seed_from_u64(3);
    let seeds: Vec<u64> = (0..3).map(|_| rng.random()).collect();
    for seed in &seeds {
        let digests: Vec<String> = [1usize, 2, 8]
            .iter()
            .map(|w| augment(fx, 0.5, *seed, *w, &format!("par-{seed}-{w}.tsv")).map(|(_, p)| sha256_file(&p)))
            .collect::<Result<_, _>>()?;
        ensure(digests.iter().all(|d| *d == digests[0]), || {
            format!("seed {seed}: {digests:?}")
        })?;
    }
    Ok(format!("workers 1/2/8 agree for seeds {seeds:?}"))
}

fn criterion_4(fx: &Fixture) -> Verdict {
    let want = target_column(&fx.corpus.text);
    for (i, theta) in [0.0, 0.3, 0.5, 0.7, 1.0].iter().enumerate() {
        let (_, out) = augment(fx, *theta, 5, 2, &format!("target{i}.tsv"))?;
        let text = std::fs::read_to_string(&out).unwrap();
        ensure(target_column(&text) == want, || {
            format!("theta {theta}: target column changed")
        })?;
    }
    Ok(format!("{} target lines unchanged at 5 thresholds", want.len()))
}

fn micro_corpus<'a>(rng: &mut StdRng, vocab: &[&'a str], pairs: usize) -> Vec<Vec<&'a str>> {
    (0..pairs)
        .map(|_| {
            let n = rng.random_range(1..9);
            (0..n).map(|_| *vocab.choose(rng).unwrap()).collect()
        })
        .collect()
}

fn criterion_5() -> Verdict {
    let mut rng = StdRng::seed_from_u64(5);
    let vocab = ["a", "b", "c", "d", "e", "f"];
    let mut worst = 0.0f64;
    let mut nonzero = 0;
    for _ in 0..50 {
        let pairs = rng.random_range(1..6);
        let size = rng.random_range(2..=vocab.len());
        let refs = micro_corpus(&mut rng, &vocab[..size], pairs);
        // hypotheses are references with a few tokens replaced, dropped or added
        let hyps: Vec<Vec<&str>> = refs
            .iter()
            .map(|r| {
                let mut h = Vec::new();
                for &t in r {
                    match rng.random_range(0..10) {
                        0 => {}
                        1 => h.push(*vocab[..size].choose(&mut rng).unwrap()),
                        2 => h.extend([t, *vocab[..size].choose(&mut rng).unwrap()]),
                        _ => h.push(t),
                    }
                }
                h
            })
            .collect();
        let got: BleuScore = corpus_bleu(&hyps, &refs).map_err(|e| e.to_string())?;
        let want = brute_force_bleu(&hyps, &refs);
        let rel = if want == 0.0 {
            got.score.abs()
        } else {
            ((got.score - want) / want).abs()
        };
        ensure(rel <= 1e-9, || format!("{hyps:?} / {refs:?}: {} vs {want}", got.score))?;
        worst = worst.max(rel);
        nonzero += usize::from(want > 0.0);

        let own: BleuScore = corpus_bleu(&refs, &refs).unwrap();
        ensure(own.score == 100.0, || format!("self score {}", own.score))?;
        let disjoint: Vec<Vec<&str>> = hyps.iter().map(|h| h.iter().map(|_| "zz").collect()).collect();
        let zero: BleuScore = corpus_bleu(&disjoint, &refs).unwrap();
        ensure(zero.score == 0.0, || format!("zero-overlap score {}", zero.score))?;
    }
    Ok(format!(
        "50 corpora ({nonzero} nonzero), max rel err {worst:.1e}; self 100, disjoint 0"
    ))
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(6);
    for case in 0..20 {
        let types = rng.random_range(5..=50);
        let mut freqs: BTreeMap<String, u64> = BTreeMap::new();
        while freqs.len() < types {
            let len = rng.random_range(1..8);
            let w: String = (0..len).map(|_| *b"abcde".choose(&mut rng).unwrap() as char).collect();
            freqs.insert(w, rng.random_range(1..6));
        }
        let mut words: Vec<&str> = freqs
            .iter()
            .flat_map(|(w, f)| std::iter::repeat_n(w.as_str(), *f as usize))
            .collect();
        words.shuffle(&mut rng);
        let corpus: Vec<Sentence> = words.chunks(7).map(|c| tokenize(&c.join(" "))).collect();
        let merges = rng.random_range(0..=20);

        let learned = learn_bpe_detailed(&corpus, merges, "</w>").map_err(|e| e.to_string())?;
        let list: Vec<(String, u64)> = freqs.into_iter().collect();
        let oracle = recount_bpe(&list, merges, "</w>");
        ensure(learned.model.merges() == oracle.merges.as_slice(), || {
            format!(
                "case {case}: merges {:?} vs {:?}",
                learned.model.merges(),
                oracle.merges
            )
        })?;
        for (w, seg) in &oracle.segmentations {
            ensure(learned.segmentations.get(w) == Some(seg), || {
                format!("case {case}: word {w}")
            })?;
            ensure(&learned.model.apply(w) == seg, || format!("case {case}: apply {w}"))?;
        }
    }

    let corpus: Vec<Sentence> = (0..300)
        .map(|_| {
            let line: Vec<String> = (0..8)
                .map(|_| {
                    (0..rng.random_range(1..9))
                        .map(|_| *b"abcdefgh".choose(&mut rng).unwrap() as char)
                        .collect()
                })
                .collect();
            tokenize(&line.join(" "))
        })
        .collect();
    let model = learn_bpe(&corpus, 200).map_err(|e| e.to_string())?;
    let alphabet: Vec<char> = "abcdefghijklmnopqrstuvwxyzéñ".chars().collect();
    for _ in 0..10_000 {
        let word: String = (0..rng.random_range(1..13))
            .map(|_| *alphabet.choose(&mut rng).unwrap())
            .collect();
        let line = segmented_line(&model.pieces(&word));
        ensure(desegment_line(&line) == word, || format!("{word} -> {line}"))?;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 5.0, || format!("took {elapsed:.2}s"))?;
    Ok(format!(
        "20 toy corpora match the recount oracle; 10^4 round trips; {elapsed:.2}s"
    ))
}

fn criterion_7() -> Verdict {
    let mut rng = StdRng::seed_from_u64(7);
    let words = [
        "kuy", "makan", "Gue", "NGGAK", "tau", "rumah", "di", "Mana", "lagi", "banget",
    ];
    let puncts = [".", ",", "!", "?!", "..."];
    for _ in 0..200 {
        let vocab: Vec<String> = words
            .iter()
            .filter(|_| rng.random_bool(0.5))
            .map(|w| w.to_lowercase())
            .collect();
        let n = rng.random_range(1..=100);
        let mut plan: Vec<(&str, bool)> = (0..n)
            .map(|_| {
                if rng.random_bool(0.2) {
                    (*puncts.choose(&mut rng).unwrap(), false)
                } else {
                    (*words.choose(&mut rng).unwrap(), true)
                }
            })
            .collect();
        plan[0] = (words[rng.random_range(0..words.len())], true);
        let line: Vec<&str> = plan.iter().map(|(t, _)| *t).collect();
        let corpus = vec![tokenize(&line.join(" "))];

        let (mut oov, mut total) = (0u64, 0u64);
        for (t, is_word) in &plan {
            if *is_word {
                total += 1;
                oov += u64::from(!vocab.iter().any(|v| *v == t.to_lowercase()));
            }
        }
        let got = oov_rate(&corpus, &vocab.iter().collect::<Vocabulary>()).map_err(|e| e.to_string())?;
        ensure(got == Fraction::new(oov, total), || {
            format!("{line:?}: {got} vs {oov}/{total}")
        })?;
    }

    for types in [1usize, 3, 10, 40] {
        let names: Vec<String> = (0..types).map(|i| format!("w{i}")).collect();
        let corpus: Vec<Sentence> = (0..25)
            .map(|_| {
                let mut s = names.clone();
                s.shuffle(&mut rng);
                tokenize(&s.join(" "))
            })
            .collect();
        let config = NgramConfig {
            order: 1,
            k: 1e-12,
            unk_singletons: false,
        };
        let model = NgramModel::<f64>::train(&corpus, &config).map_err(|e| e.to_string())?;
        let ppl = model.perplexity(&corpus).map_err(|e| e.to_string())?;
        // every word type and the end of sentence are predicted equally often
        let v = (types + 1) as f64;
        ensure((ppl - v).abs() <= 1e-6, || format!("{types} types: ppl {ppl} vs {v}"))?;
    }

    let lexicon = Lexicon::parse(LEXICON_TSV).unwrap();
    let keys = lexicon_keys();
    let mut gaps = Vec::new();
    for pair in 0..20u64 {
        let sentence = |rng: &mut StdRng| {
            let start = rng.random_range(0..FILLER.len());
            let line: Vec<&str> = (0..rng.random_range(6..12))
                .map(|k| {
                    if k % 3 == 1 {
                        keys[(start + k) % keys.len()]
                    } else {
                        FILLER[(start + k) % FILLER.len()]
                    }
                })
                .collect();
            tokenize(&line.join(" "))
        };
        let train: Vec<Sentence> = (0..200).map(|_| sentence(&mut rng)).collect();
        let clean: Vec<Sentence> = (0..50).map(|_| sentence(&mut rng)).collect();
        let config = AugmentationConfig::new(1.0, pair).unwrap();
        let noised: Vec<Sentence> = clean
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let colloquial = transform_sentence(s, &lexicon, &config, &mut PairRng::new(pair, i as u64)).sentence;
                // drop interior vowels of long words, as in typed shorthand
                let line: Vec<String> = colloquial
                    .surfaces()
                    .iter()
                    .map(|w| {
                        if w.len() > 4 && rng.random_bool(0.3) {
                            w.chars()
                                .enumerate()
                                .filter(|(j, c)| *j == 0 || !"aiueo".contains(*c))
                                .map(|(_, c)| c)
                                .collect()
                        } else {
                            (*w).to_owned()
                        }
                    })
                    .collect();
                tokenize(&line.join(" "))
            })
            .collect();
        let model = train_ngram::<f64>(&train, 3, 0.1).map_err(|e| e.to_string())?;
        let p_clean = model.perplexity(&clean).unwrap();
        let p_noised = model.perplexity(&noised).unwrap();
        ensure(p_clean < p_noised, || {
            format!("pair {pair}: clean {p_clean} >= noised {p_noised}")
        })?;
        gaps.push(p_noised / p_clean);
    }
    let min_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(format!(
        "OOV exact on 200 corpora; uniform PPL = V; clean < noised on 20 pairs (min ratio {min_gap:.2})"
    ))
}

fn criterion_8(dir: &Path) -> Verdict {
    let input = write(
        dir,
        "filter.tsv",
        "satu dua tiga empat\tfour\nsatu dua tiga empat lima\tfive\nsatu dua tiga\tthree\nsatu dua tiga empat lima enam\tsix\n",
    );
    let out = dir.join("filtered.tsv");
    let output = run(&[
        "filter",
        path_str(&input),
        "--min-tokens",
        "5",
        "--output",
        path_str(&out),
    ]);
    ensure(output.status.success(), || {
        String::from_utf8_lossy(&output.stderr).into_owned()
    })?;
    let kept = std::fs::read_to_string(&out).unwrap();
    ensure(
        kept == "satu dua tiga empat lima\tfive\nsatu dua tiga empat lima enam\tsix\n",
        || format!("kept {kept:?}"),
    )?;
    Ok("4-token pair dropped, 5-token pair kept".into())
}

fn criterion_9() -> Verdict {
    let lexicon = Lexicon::parse("tidak\tgak,nggak,ga,enggak\n").unwrap();
    let config = AugmentationConfig::new(1.0, 0).unwrap();
    let sentence = tokenize("tidak");
    let trials = 100_000u64;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for i in 0..trials {
        let out = transform_sentence(&sentence, &lexicon, &config, &mut PairRng::new(2019, i));
        *counts.entry(out.sentence.surfaces()[0].to_owned()).or_default() += 1;
    }
    ensure(counts.len() == 4, || format!("variants seen: {counts:?}"))?;
    let freqs: Vec<String> = counts
        .iter()
        .map(|(v, c)| format!("{v}={:.4}", *c as f64 / trials as f64))
        .collect();
    for (v, c) in &counts {
        let f = *c as f64 / trials as f64;
        ensure((f - 0.25).abs() <= 0.01, || format!("{v}: {f}"))?;
    }
    Ok(freqs.join(" "))
}

fn main() -> ExitCode {
    let fx = fixture();
    let results: Vec<(&str, Verdict)> = vec![
        ("threshold linearity", criterion_1(&fx)),
        ("identity and saturation", criterion_2(&fx)),
        ("determinism under parallelism", criterion_3(&fx)),
        ("target side preserved", criterion_4(&fx)),
        ("BLEU oracle", criterion_5()),
        ("BPE oracle", criterion_6()),
        ("stats oracles", criterion_7()),
        ("filter boundary", criterion_8(fx.dir.path())),
        ("variant uniformity", criterion_9()),
    ];
    let mut failed = 0;
    for (i, (name, verdict)) in results.iter().enumerate() {
        match verdict {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
