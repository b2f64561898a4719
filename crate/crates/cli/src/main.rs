//! Command-line front end for the corpus construction pipeline.
//!
//! `run` executes the whole pipeline from one config file; the other
//! subcommands run individual stages standalone on the documented
//! intermediate files so any stage can be inspected in isolation:
//!
//! ```text
//! ingest    article dump (JSONL)        -> articles.jsonl (categorized)
//! clean     articles.jsonl              -> cleaned.tsv
//! annotate  cleaned.tsv                 -> annotated.tsv
//! dedup     annotated.tsv               -> deduped.tsv + dedup_report.json
//! sample    deduped.tsv                 -> sampled.tsv + quotas.json
//! split     sampled.tsv + translations  -> corpus files (same as `run`)
//! stats     corpus directory            -> distribution table on stdout
//! score     hyp + ref text files        -> metric scores on stdout
//! ```
//!
//! Exit codes: 0 success, 1 validation error (bad config, missing input,
//! mismatched score files), 2 runtime stage error.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use nepcorpus::clean::VerbPatterns;
use nepcorpus::dedup::{
    assign_similarity_bands, BandBoundaries, FileBackedProvider, HashedNgramEmbedder,
};
use nepcorpus::ingest::{categorize, parse_article_stream, CategoryFunnel, KeywordMap};
use nepcorpus::io::{read_annotated, read_cleaned, write_annotated, write_cleaned, CleanedRecord};
use nepcorpus::pipeline::{load_translations, PipelineError};
use nepcorpus::report::render_stats;
use nepcorpus::{
    annotate, bleu, chrf, chrf_pp, clean_pipeline, compute_targets, corpus_stats, emit_manifest,
    exact_dedup, load_manifest, run_pipeline, semantic_filter, split_sentences, split_train_test,
    stratified_sample, AnnotatedSentence, Article, BleuConfig, Category, ChrfConfig, CleanOutcome,
    CleanerConfig, CorpusManifest, DedupReport, EmbeddingProvider, LengthClass, MetricReport,
    Origin, ParallelPair, PatternTable, PipelineConfig, Rejection, SegmenterConfig, Split,
    StageCounts,
};

/// Corpus construction toolkit: build, sample, and score a Nepali–Tamang
/// parallel corpus.
#[derive(Parser)]
#[command(name = "nepcorpus", version, max_term_width = 100)]
struct Cli {
    /// Pipeline configuration TOML.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Random seed, overriding the one in the config.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,

    /// Output directory for files this command writes (default "out").
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline from the article dump to the corpus files.
    Run,
    /// Parse and categorize an article dump into categorized-article JSONL.
    Ingest {
        /// Article dump (line-delimited JSON); defaults to the config's
        /// article_dump path.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
    },
    /// Segment categorized articles into sentences and clean them.
    Clean {
        /// Categorized articles produced by `ingest`.
        #[arg(long, value_name = "PATH")]
        articles: PathBuf,
    },
    /// Classify cleaned sentences by length, tense, and polarity.
    Annotate {
        /// Cleaned sentences produced by `clean`.
        #[arg(long, value_name = "PATH")]
        sentences: PathBuf,
    },
    /// Drop exact and near-duplicate sentences, then band the survivors.
    Dedup {
        /// Annotated sentences produced by `annotate`.
        #[arg(long, value_name = "PATH")]
        sentences: PathBuf,
    },
    /// Draw the stratified sample configured under [sampling].
    Sample {
        /// Annotated sentences produced by `dedup`.
        #[arg(long, value_name = "PATH")]
        sentences: PathBuf,
    },
    /// Pair sentences with translations, assign train/test, emit the corpus.
    Split {
        /// Annotated sentences produced by `sample` (or `dedup`).
        #[arg(long, value_name = "PATH")]
        sentences: PathBuf,
        /// sentence_id<TAB>translation file; defaults to the config's
        /// translations path.
        #[arg(long, value_name = "PATH")]
        translations: Option<PathBuf>,
    },
    /// Print the distribution statistics of an emitted corpus.
    Stats {
        /// Directory containing the corpus files from `run` or `split`.
        #[arg(long, value_name = "DIR")]
        corpus: PathBuf,
    },
    /// Score hypothesis translations against references.
    Score {
        /// Hypothesis translations, one per line.
        #[arg(long, value_name = "PATH")]
        hyp: PathBuf,
        /// Reference translations, one per line.
        #[arg(long = "ref", value_name = "PATH")]
        reference: PathBuf,
        /// Metric to run: bleu, chrf, chrfpp, or all.
        #[arg(long, default_value = "all", value_name = "NAME")]
        metric: String,
    },
}

/// A failed command, classified for the exit code.
enum Failure {
    /// Bad configuration or inputs, detected before a stage ran: exit 1.
    Validation(anyhow::Error),
    /// A stage failed while executing: exit 2.
    Runtime(anyhow::Error),
}

fn validation<E: Into<anyhow::Error>>(err: E) -> Failure {
    Failure::Validation(err.into())
}

fn runtime<E: Into<anyhow::Error>>(err: E) -> Failure {
    Failure::Runtime(err.into())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let config = load_config(&cli)?;
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    match &cli.command {
        Command::Run => cmd_run(config.as_ref(), &out_dir),
        Command::Ingest { dump } => cmd_ingest(config.as_ref(), dump.as_deref(), &out_dir),
        Command::Clean { articles } => cmd_clean(config.as_ref(), articles, &out_dir),
        Command::Annotate { sentences } => cmd_annotate(config.as_ref(), sentences, &out_dir),
        Command::Dedup { sentences } => cmd_dedup(config.as_ref(), sentences, &out_dir),
        Command::Sample { sentences } => cmd_sample(config.as_ref(), sentences, &out_dir),
        Command::Split {
            sentences,
            translations,
        } => cmd_split(
            config.as_ref(),
            cli.seed,
            sentences,
            translations.as_deref(),
            &out_dir,
        ),
        Command::Stats { corpus } => cmd_stats(corpus),
        Command::Score {
            hyp,
            reference,
            metric,
        } => cmd_score(hyp, reference, metric, cli.out.as_deref()),
    }
}

/// Loads the config when one was given and applies the seed override.
fn load_config(cli: &Cli) -> Result<Option<PipelineConfig>, Failure> {
    let Some(path) = &cli.config else {
        return Ok(None);
    };
    let mut config = PipelineConfig::from_toml_path(path)
        .with_context(|| format!("loading config {}", path.display()))
        .map_err(Failure::Validation)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(Some(config))
}

fn require_config<'a>(
    config: Option<&'a PipelineConfig>,
    why: &str,
) -> Result<&'a PipelineConfig, Failure> {
    config.ok_or_else(|| Failure::Validation(anyhow!("--config is required {why}")))
}

// ---------------------------------------------------------------------------
// Shared stage resources
// ---------------------------------------------------------------------------

/// Rule files resolved from the config, falling back to the compiled-in
/// defaults — the same resolution `run` performs.
struct StageResources {
    patterns: PatternTable,
    funnel: CategoryFunnel,
    keywords: KeywordMap,
    cleaner: CleanerConfig,
    segmenter: SegmenterConfig,
}

fn stage_resources(config: Option<&PipelineConfig>) -> Result<StageResources, Failure> {
    let patterns = match config.and_then(|c| c.paths.pattern_tables.as_ref()) {
        Some(path) => PatternTable::from_path(path).map_err(validation)?,
        None => PatternTable::builtin().clone(),
    };
    let funnel = match config.and_then(|c| c.paths.layer_rules.as_ref()) {
        Some(path) => CategoryFunnel::from_path(path).map_err(validation)?,
        None => CategoryFunnel::builtin().clone(),
    };
    let keywords = match config.and_then(|c| c.paths.keyword_map.as_ref()) {
        Some(path) => KeywordMap::from_path(path).map_err(validation)?,
        None => KeywordMap::builtin().clone(),
    };
    let segmenter = SegmenterConfig::default();
    let cleaner = match config {
        Some(config) => CleanerConfig {
            advert_phrases: config.cleaner.advert_phrases.clone(),
            typo_fixes: config.cleaner.typo_fixes.clone(),
            prefix_separators: config.cleaner.prefix_separators.clone(),
            max_prefix_tokens: config.cleaner.max_prefix_tokens,
            max_special_chars: config.cleaner.max_special_chars,
            verb: VerbPatterns::from_table(&patterns),
            terminators: segmenter.terminators.clone(),
        },
        None => CleanerConfig::default(),
    };
    Ok(StageResources {
        patterns,
        funnel,
        keywords,
        cleaner,
        segmenter,
    })
}

/// Embedding provider and band boundaries from the [dedup] section (or its
/// defaults when no config was given).
fn dedup_resources(
    config: Option<&PipelineConfig>,
) -> Result<(Box<dyn EmbeddingProvider>, BandBoundaries, f64), Failure> {
    let section = config.map(|c| c.dedup.clone()).unwrap_or_default();
    let provider: Box<dyn EmbeddingProvider> = match section.provider.as_str() {
        "file" => {
            let path = config
                .and_then(|c| c.paths.embedding_vectors.as_ref())
                .ok_or_else(|| {
                    Failure::Validation(anyhow!(
                        "dedup.provider is \"file\" but paths.embedding_vectors is not set"
                    ))
                })?;
            Box::new(FileBackedProvider::from_path(path).map_err(validation)?)
        }
        "builtin" => Box::new(HashedNgramEmbedder::new(section.dimension)),
        other => {
            return Err(Failure::Validation(anyhow!(
                "unknown dedup provider {other:?}: expected \"builtin\" or \"file\""
            )))
        }
    };
    let boundaries = match section.band_boundaries {
        Some([low, medium]) => BandBoundaries {
            low_max: low,
            medium_max: medium,
        },
        None => BandBoundaries::thirds_of(section.threshold),
    };
    Ok((provider, boundaries, section.threshold))
}

// ---------------------------------------------------------------------------
// Small IO helpers
// ---------------------------------------------------------------------------

fn open_input(path: &Path) -> Result<BufReader<File>, Failure> {
    let file = File::open(path)
        .with_context(|| format!("opening {}", path.display()))
        .map_err(Failure::Validation)?;
    Ok(BufReader::new(file))
}

fn create_output(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), Failure> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(Failure::Runtime)?;
    let path = dir.join(name);
    let file = File::create(&path)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(Failure::Runtime)?;
    Ok((path, BufWriter::new(file)))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, Failure> {
    let (path, mut writer) = create_output(dir, name)?;
    let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
    writer
        .write_all(text.as_bytes())
        .and_then(|()| writer.flush())
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Runtime)?;
    Ok(path)
}

fn print_stage(stage: &StageCounts) {
    let rejected: Vec<String> = stage
        .rejections
        .iter()
        .filter(|(_, n)| **n > 0)
        .map(|(reason, n)| format!("{reason} {n}"))
        .collect();
    println!(
        "{:<16} {:>7} in {:>7} out  {}",
        stage.stage,
        stage.input,
        stage.output,
        rejected.join(", ")
    );
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

fn cmd_run(config: Option<&PipelineConfig>, out_dir: &Path) -> Result<(), Failure> {
    let config = require_config(config, "to run the pipeline")?;
    let outcome = run_pipeline(config, out_dir).map_err(|err| match err {
        PipelineError::Config(inner) => validation(inner),
        other => runtime(other),
    })?;
    for stage in &outcome.stages {
        print_stage(stage);
    }
    summarize_corpus(&outcome.manifest, out_dir);
    Ok(())
}

fn summarize_corpus(manifest: &CorpusManifest, out_dir: &Path) {
    let mut train = 0usize;
    let mut test = 0usize;
    let mut unassigned = 0usize;
    for pair in &manifest.pairs {
        match pair.split {
            Split::Train => train += 1,
            Split::Test => test += 1,
            Split::Unassigned => unassigned += 1,
        }
    }
    println!(
        "wrote {} pairs (train {train} / test {test} / unassigned {unassigned}) to {}",
        manifest.pairs.len(),
        out_dir.display()
    );
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

/// One line of the `ingest` output: an article plus its resolved category.
#[derive(Serialize, Deserialize)]
struct CategorizedArticle {
    category: Category,
    article: Article,
}

fn cmd_ingest(
    config: Option<&PipelineConfig>,
    dump: Option<&Path>,
    out_dir: &Path,
) -> Result<(), Failure> {
    let resources = stage_resources(config)?;
    let dump = match (dump, config) {
        (Some(path), _) => path.to_path_buf(),
        (None, Some(config)) => config.paths.article_dump.clone(),
        (None, None) => {
            return Err(Failure::Validation(anyhow!(
                "no article dump: pass --dump or set paths.article_dump in the config"
            )))
        }
    };
    let report = parse_article_stream(open_input(&dump)?)
        .with_context(|| format!("reading {}", dump.display()))
        .map_err(Failure::Runtime)?;
    print_stage(&StageCounts {
        stage: "ingest".to_string(),
        input: report.lines_read,
        output: report.articles.len(),
        rejections: BTreeMap::from([
            ("blank_line".to_string(), report.blank_lines),
            ("malformed_json".to_string(), report.malformed),
            ("empty_body".to_string(), report.empty_body),
            ("duplicate_id".to_string(), report.duplicate_id),
            ("duplicate_url".to_string(), report.duplicate_url),
        ]),
    });

    let article_count = report.articles.len();
    let mut categorized = Vec::with_capacity(article_count);
    for article in report.articles {
        if let Some(category) = categorize(&article, &resources.funnel, &resources.keywords) {
            categorized.push(CategorizedArticle { category, article });
        }
    }
    print_stage(&StageCounts {
        stage: "categorize".to_string(),
        input: article_count,
        output: categorized.len(),
        rejections: BTreeMap::from([(
            "uncategorized".to_string(),
            article_count - categorized.len(),
        )]),
    });

    let (path, mut writer) = create_output(out_dir, "articles.jsonl")?;
    for entry in &categorized {
        let line = serde_json::to_string(entry).expect("article serializes");
        writeln!(writer, "{line}")
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Runtime)?;
    }
    writer.flush().map_err(runtime)?;
    println!("wrote {} categorized articles to {}", categorized.len(), path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// clean
// ---------------------------------------------------------------------------

fn cmd_clean(
    config: Option<&PipelineConfig>,
    articles: &Path,
    out_dir: &Path,
) -> Result<(), Failure> {
    let resources = stage_resources(config)?;
    let mut entries: Vec<CategorizedArticle> = Vec::new();
    for (index, line) in open_input(articles)?.lines().enumerate() {
        let line = line
            .with_context(|| format!("reading {}", articles.display()))
            .map_err(Failure::Runtime)?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: CategorizedArticle = serde_json::from_str(&line)
            .with_context(|| format!("{} line {}", articles.display(), index + 1))
            .map_err(Failure::Runtime)?;
        entries.push(entry);
    }

    let mut segments: Vec<(String, Category, String)> = Vec::new();
    for entry in &entries {
        for text in split_sentences(&entry.article.body, &resources.segmenter) {
            segments.push((entry.article.id.clone(), entry.category, text));
        }
    }
    print_stage(&StageCounts {
        stage: "segment".to_string(),
        input: segments.len(),
        output: segments.len(),
        rejections: BTreeMap::new(),
    });

    let segment_count = segments.len();
    let mut rejections: BTreeMap<String, usize> = [
        Rejection::ForeignScript,
        Rejection::AdvertPhrase,
        Rejection::TooManySpecials,
        Rejection::EmptyAfterClean,
        Rejection::NoVerbEnding,
    ]
    .into_iter()
    .map(|r| (r.as_str().to_string(), 0))
    .collect();
    let mut records: Vec<CleanedRecord> = Vec::new();
    for (article_id, category, text) in segments {
        match clean_pipeline(&text, &resources.cleaner) {
            CleanOutcome::Cleaned(text) => records.push(CleanedRecord {
                id: format!("s{:06}", records.len() + 1),
                article_id: Some(article_id),
                category,
                text,
            }),
            CleanOutcome::Rejected(rejection) => {
                *rejections.entry(rejection.as_str().to_string()).or_insert(0) += 1;
            }
        }
    }
    print_stage(&StageCounts {
        stage: "clean".to_string(),
        input: segment_count,
        output: records.len(),
        rejections,
    });

    let (path, mut writer) = create_output(out_dir, "cleaned.tsv")?;
    write_cleaned(&mut writer, &records).map_err(runtime)?;
    writer.flush().map_err(runtime)?;
    println!("wrote {} cleaned sentences to {}", records.len(), path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// annotate
// ---------------------------------------------------------------------------

fn cmd_annotate(
    config: Option<&PipelineConfig>,
    sentences: &Path,
    out_dir: &Path,
) -> Result<(), Failure> {
    let resources = stage_resources(config)?;
    let records = read_cleaned(open_input(sentences)?).map_err(runtime)?;
    let mut annotated = Vec::with_capacity(records.len());
    for record in records {
        let sentence = annotate(
            record.id,
            record.text,
            record.category,
            &resources.patterns,
            Origin::Scraped,
            record.article_id,
        )
        .map_err(runtime)?;
        annotated.push(sentence);
    }
    print_stage(&StageCounts {
        stage: "annotate".to_string(),
        input: annotated.len(),
        output: annotated.len(),
        rejections: BTreeMap::new(),
    });

    let (path, mut writer) = create_output(out_dir, "annotated.tsv")?;
    write_annotated(&mut writer, &annotated).map_err(runtime)?;
    writer.flush().map_err(runtime)?;
    println!("wrote {} annotated sentences to {}", annotated.len(), path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// dedup
// ---------------------------------------------------------------------------

/// `dedup_report.json`: exact duplicates dropped plus the per-category
/// near-duplicate reports.
#[derive(Serialize)]
struct DedupSummary {
    exact_duplicates: Vec<String>,
    near_duplicates: BTreeMap<String, DedupReport>,
}

fn cmd_dedup(
    config: Option<&PipelineConfig>,
    sentences: &Path,
    out_dir: &Path,
) -> Result<(), Failure> {
    let (provider, boundaries, threshold) = dedup_resources(config)?;
    let annotated = read_annotated(open_input(sentences)?).map_err(runtime)?;

    let input_count = annotated.len();
    let (unique, exact_duplicates) = exact_dedup(annotated);
    print_stage(&StageCounts {
        stage: "exact_dedup".to_string(),
        input: input_count,
        output: unique.len(),
        rejections: BTreeMap::from([("exact_duplicate".to_string(), exact_duplicates.len())]),
    });

    let unique_count = unique.len();
    let mut by_category: BTreeMap<Category, Vec<AnnotatedSentence>> = BTreeMap::new();
    for sentence in unique {
        by_category.entry(sentence.category).or_default().push(sentence);
    }
    let mut near_duplicates: BTreeMap<String, DedupReport> = BTreeMap::new();
    let mut survivors: Vec<AnnotatedSentence> = Vec::with_capacity(unique_count);
    for (category, group) in by_category {
        let (kept, report) =
            semantic_filter(group, provider.as_ref(), threshold).map_err(runtime)?;
        near_duplicates.insert(category.as_str().to_string(), report);
        survivors.extend(kept);
    }
    survivors.sort_by(|a, b| a.id.cmp(&b.id));
    let near_dropped = unique_count - survivors.len();
    assign_similarity_bands(&mut survivors, provider.as_ref(), boundaries).map_err(runtime)?;
    print_stage(&StageCounts {
        stage: "near_duplicates".to_string(),
        input: unique_count,
        output: survivors.len(),
        rejections: BTreeMap::from([("near_duplicate".to_string(), near_dropped)]),
    });

    let (path, mut writer) = create_output(out_dir, "deduped.tsv")?;
    write_annotated(&mut writer, &survivors).map_err(runtime)?;
    writer.flush().map_err(runtime)?;
    let report_path = write_json(
        out_dir,
        "dedup_report.json",
        &DedupSummary {
            exact_duplicates,
            near_duplicates,
        },
    )?;
    println!(
        "wrote {} deduplicated sentences to {} (report: {})",
        survivors.len(),
        path.display(),
        report_path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

fn cmd_sample(
    config: Option<&PipelineConfig>,
    sentences: &Path,
    out_dir: &Path,
) -> Result<(), Failure> {
    let config = require_config(config, "to read the [sampling] section")?;
    let total = config.sampling.total_requested.ok_or_else(|| {
        Failure::Validation(anyhow!("the config does not set sampling.total_requested"))
    })?;
    let annotated = read_annotated(open_input(sentences)?).map_err(runtime)?;

    let input_count = annotated.len();
    let mut rejections: BTreeMap<String, usize> =
        BTreeMap::from([("below_min".to_string(), 0), ("out_of_range".to_string(), 0)]);
    if config.keep_below_min {
        log::warn!("keep_below_min is ignored when sampling: quota axes cover sampleable lengths only");
    }
    let pool: Vec<AnnotatedSentence> = annotated
        .into_iter()
        .filter(|s| match s.length_class {
            LengthClass::OutOfRange => {
                *rejections.get_mut("out_of_range").unwrap() += 1;
                false
            }
            LengthClass::BelowMin => {
                *rejections.get_mut("below_min").unwrap() += 1;
                false
            }
            _ => true,
        })
        .collect();

    let spec = config.distribution_spec(total).map_err(validation)?;
    let mut quotas = compute_targets(&pool, &spec).map_err(runtime)?;
    let ids = stratified_sample(&pool, &mut quotas, config.seed).map_err(runtime)?;
    let chosen: HashSet<&str> = ids.iter().map(String::as_str).collect();
    let mut not_selected = 0usize;
    let selected: Vec<AnnotatedSentence> = pool
        .into_iter()
        .filter(|s| {
            let keep = chosen.contains(s.id.as_str());
            if !keep {
                not_selected += 1;
            }
            keep
        })
        .collect();
    rejections.insert("not_selected".to_string(), not_selected);
    print_stage(&StageCounts {
        stage: "sample".to_string(),
        input: input_count,
        output: selected.len(),
        rejections,
    });

    let (path, mut writer) = create_output(out_dir, "sampled.tsv")?;
    write_annotated(&mut writer, &selected).map_err(runtime)?;
    writer.flush().map_err(runtime)?;
    let quota_path = write_json(out_dir, "quotas.json", &quotas.rows())?;
    println!(
        "wrote {} sampled sentences to {} (quotas: {})",
        selected.len(),
        path.display(),
        quota_path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

fn cmd_split(
    config: Option<&PipelineConfig>,
    seed_flag: Option<u64>,
    sentences: &Path,
    translations: Option<&Path>,
    out_dir: &Path,
) -> Result<(), Failure> {
    let seed = seed_flag
        .or(config.map(|c| c.seed))
        .ok_or_else(|| Failure::Validation(anyhow!("a seed is required: pass --seed or --config")))?;
    let test_fraction = config.map_or(0.25, |c| c.test_fraction);
    let translations_path = translations
        .map(Path::to_path_buf)
        .or_else(|| config.and_then(|c| c.paths.translations.clone()))
        .ok_or_else(|| {
            Failure::Validation(anyhow!(
                "no translations file: pass --translations or set paths.translations"
            ))
        })?;

    let annotated = read_annotated(open_input(sentences)?).map_err(runtime)?;
    let translations = load_translations(&translations_path).map_err(runtime)?;

    let mut pairs: Vec<ParallelPair> = annotated
        .into_iter()
        .enumerate()
        .map(|(i, sentence)| {
            let tamang = translations.get(&sentence.id).cloned().unwrap_or_default();
            ParallelPair {
                id: format!("p{:06}", i + 1),
                nepali: sentence,
                tamang,
                split: Split::Unassigned,
            }
        })
        .collect();
    let untranslated = pairs.iter().filter(|p| p.tamang.is_empty()).count();
    print_stage(&StageCounts {
        stage: "translate".to_string(),
        input: pairs.len(),
        output: pairs.len() - untranslated,
        rejections: BTreeMap::from([("untranslated".to_string(), untranslated)]),
    });

    // Only translated pairs receive a split; the rest stay in the corpus as
    // Unassigned, exactly as in `run`.
    let mut translated: Vec<ParallelPair> = pairs
        .iter()
        .filter(|p| !p.tamang.is_empty())
        .cloned()
        .collect();
    split_train_test(&mut translated, test_fraction, seed).map_err(runtime)?;
    let assignment: BTreeMap<&str, Split> = translated
        .iter()
        .map(|p| (p.id.as_str(), p.split))
        .collect();
    for pair in &mut pairs {
        if let Some(&split) = assignment.get(pair.id.as_str()) {
            pair.split = split;
        }
    }

    let stats = corpus_stats(&pairs);
    let manifest = CorpusManifest {
        pairs,
        stats,
        seed,
        pipeline_config_hash: config.map_or_else(|| "unconfigured".to_string(), |c| c.config_hash()),
    };
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(Failure::Runtime)?;
    emit_manifest(&manifest, out_dir).map_err(runtime)?;
    summarize_corpus(&manifest, out_dir);
    Ok(())
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

fn cmd_stats(corpus: &Path) -> Result<(), Failure> {
    if !corpus.join("manifest.json").is_file() {
        return Err(Failure::Validation(anyhow!(
            "{} does not contain a manifest.json",
            corpus.display()
        )));
    }
    let manifest = load_manifest(corpus).map_err(runtime)?;
    let recomputed = corpus_stats(&manifest.pairs);
    if recomputed != manifest.stats {
        return Err(Failure::Runtime(anyhow!(
            "stored statistics do not match the pairs in {}: the corpus was modified after it was emitted",
            corpus.display()
        )));
    }
    print!("{}", render_stats(&recomputed));
    Ok(())
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

fn cmd_score(
    hyp: &Path,
    reference: &Path,
    metric: &str,
    out_dir: Option<&Path>,
) -> Result<(), Failure> {
    let read_lines = |path: &Path| -> Result<Vec<String>, Failure> {
        let mut lines = Vec::new();
        for line in open_input(path)?.lines() {
            lines.push(
                line.with_context(|| format!("reading {}", path.display()))
                    .map_err(Failure::Runtime)?,
            );
        }
        Ok(lines)
    };
    let hyps = read_lines(hyp)?;
    let refs = read_lines(reference)?;

    let wanted: Vec<&str> = match metric {
        "all" => vec!["bleu", "chrf", "chrfpp"],
        "bleu" | "chrf" | "chrfpp" => vec![metric],
        other => {
            return Err(Failure::Validation(anyhow!(
                "unknown metric {other:?}: expected bleu, chrf, chrfpp, or all"
            )))
        }
    };
    let mut reports: Vec<MetricReport> = Vec::new();
    for name in wanted {
        let report = match name {
            "bleu" => bleu(&hyps, &refs, &BleuConfig::default()),
            "chrf" => chrf(&hyps, &refs, &ChrfConfig::default()),
            _ => chrf_pp(&hyps, &refs),
        }
        .map_err(validation)?;
        println!("{:<8} {:>8.3}  {}", report.metric, report.score, report.signature);
        reports.push(report);
    }
    if let Some(dir) = out_dir {
        let path = write_json(dir, "scores.json", &reports)?;
        println!("wrote scores to {}", path.display());
    }
    Ok(())
}

