//! End-to-end corpus construction from one config.
//!
//! [`run_pipeline`] chains every stage in a fixed order:
//!
//! 1. **ingest** — parse the article dump, dropping malformed, empty,
//!    and duplicate entries;
//! 2. **categorize** — resolve each article to a canonical category via
//!    the layer funnel and keyword map, dropping unresolvable ones;
//! 3. **segment** — split article bodies into sentences;
//! 4. **clean** — normalize each sentence or reject it;
//! 5. **annotate** — classify length, tense, and polarity;
//! 6. **exact_dedup** — drop repeated sentences by normalized text;
//! 7. **near_duplicates** — drop near-duplicates per category, then
//!    grade the survivors into similarity bands;
//! 8. **sample** — drop sentences outside the sampleable length range,
//!    then draw the configured stratified sample (when requested);
//! 9. **borrowed** — merge pre-translated pairs, cleaned and annotated
//!    but exempt from deduplication and quotas;
//! 10. **translate** — attach translations by sentence id; sentences
//!     without one stay in the corpus untranslated;
//! 11. **split** — assign translated pairs to train/test.
//!
//! Every stage reports conserved counts (`input == output + rejections`),
//! counted in that stage's own unit — the segmenter's unit is the
//! sentences it emits. Given identical inputs and config, two runs emit
//! byte-identical corpora regardless of the thread count: per-sentence
//! stages use order-preserving parallel maps and every random draw comes
//! from a named substream of the root seed.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::annotate::{annotate, AnnotateError};
use crate::clean::{clean_pipeline, CleanOutcome, CleanerConfig, Rejection, VerbPatterns};
use crate::config::{ConfigError, PipelineConfig};
use crate::dedup::{
    assign_similarity_bands, exact_dedup, semantic_filter, BandBoundaries, DedupError,
    DedupReport, EmbeddingProvider, FileBackedProvider, HashedNgramEmbedder,
};
use crate::ingest::{categorize, parse_article_stream, CategoryFunnel, IngestError, KeywordMap};
use crate::model::{
    AnnotatedSentence, Category, CorpusManifest, LengthClass, Origin, ParallelPair, Split,
};
use crate::patterns::{PatternError, PatternTable};
use crate::report::{corpus_stats, emit_manifest, ReportError};
use crate::sample::{
    compute_targets, split_train_test, stratified_sample, QuotaRow, QuotaTable, SampleError,
};
use crate::segment::{split_sentences, SegmenterConfig};

/// Why a pipeline run failed.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration")]
    Config(#[from] ConfigError),
    #[error("invalid pattern tables")]
    Patterns(#[from] PatternError),
    #[error("invalid categorization rules")]
    Rules(#[from] IngestError),
    #[error("cleaned sentence failed annotation")]
    Annotate(#[from] AnnotateError),
    #[error("near-duplicate filtering failed")]
    Dedup(#[from] DedupError),
    #[error("sampling failed")]
    Sample(#[from] SampleError),
    #[error("emitting the corpus failed")]
    Emit(#[from] ReportError),
    #[error("failed reading {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("translations file {path} line {line}: {reason}")]
    Translations {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("could not build the worker pool: {0}")]
    Threads(String),
}

/// Conserved in/out counts for one stage.
///
/// `input` always equals `output` plus the sum of `rejections`, each
/// measured in the stage's own unit (articles, sentences, or pairs).
/// Rejection keys are stable snake_case strings; a key may be present
/// with a zero count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    /// Stage name, unique within a run.
    pub stage: String,
    /// Items entering the stage.
    pub input: usize,
    /// Items leaving the stage.
    pub output: usize,
    /// Items removed, by reason.
    pub rejections: BTreeMap<String, usize>,
}

impl StageCounts {
    fn new(stage: &str, input: usize, output: usize, rejections: BTreeMap<String, usize>) -> Self {
        let counts = StageCounts {
            stage: stage.to_string(),
            input,
            output,
            rejections,
        };
        debug_assert!(counts.is_conserved(), "unbalanced counts for {stage}");
        counts
    }

    /// Whether `input == output + Σ rejections`.
    pub fn is_conserved(&self) -> bool {
        self.input == self.output + self.rejections.values().sum::<usize>()
    }
}

/// Everything a finished run produced.
#[derive(Debug)]
pub struct PipelineOutcome {
    /// The corpus that was written to the output directory.
    pub manifest: CorpusManifest,
    /// Conserved counts for every stage, in execution order.
    pub stages: Vec<StageCounts>,
    /// Near-duplicate filter results, keyed by category name.
    pub dedup: BTreeMap<String, DedupReport>,
    /// Sampling quotas, when a sample size was configured.
    pub quotas: Option<QuotaTable>,
}

/// The machine-readable summary written next to the corpus.
#[derive(Serialize)]
struct RunReport<'a> {
    seed: u64,
    config_hash: &'a str,
    stages: &'a [StageCounts],
    dedup: &'a BTreeMap<String, DedupReport>,
    quotas: Option<Vec<QuotaRow>>,
}

/// A pre-translated pair supplied as one JSON line.
#[derive(Debug, Deserialize)]
struct BorrowedRow {
    /// Optional upstream id; generated when absent.
    #[serde(default)]
    id: Option<String>,
    nepali: String,
    tamang: String,
    /// Optional category name; defaults to general communication.
    #[serde(default)]
    category: Option<String>,
}

/// A sentence between segmentation and annotation.
struct Seed {
    article_id: String,
    category: Category,
    text: String,
}

/// Loaded rule files and derived per-stage configs.
struct Resources {
    patterns: PatternTable,
    funnel: CategoryFunnel,
    keywords: KeywordMap,
    cleaner: CleanerConfig,
    segmenter: SegmenterConfig,
    provider: Box<dyn EmbeddingProvider>,
    boundaries: BandBoundaries,
}

impl Resources {
    fn load(config: &PipelineConfig) -> Result<Resources, PipelineError> {
        let patterns = match &config.paths.pattern_tables {
            Some(path) => PatternTable::from_path(path)?,
            None => PatternTable::builtin().clone(),
        };
        let funnel = match &config.paths.layer_rules {
            Some(path) => CategoryFunnel::from_path(path)?,
            None => CategoryFunnel::builtin().clone(),
        };
        let keywords = match &config.paths.keyword_map {
            Some(path) => KeywordMap::from_path(path)?,
            None => KeywordMap::builtin().clone(),
        };
        let segmenter = SegmenterConfig::default();
        let cleaner = CleanerConfig {
            advert_phrases: config.cleaner.advert_phrases.clone(),
            typo_fixes: config.cleaner.typo_fixes.clone(),
            prefix_separators: config.cleaner.prefix_separators.clone(),
            max_prefix_tokens: config.cleaner.max_prefix_tokens,
            max_special_chars: config.cleaner.max_special_chars,
            verb: VerbPatterns::from_table(&patterns),
            terminators: segmenter.terminators.clone(),
        };
        let provider: Box<dyn EmbeddingProvider> = match config.dedup.provider.as_str() {
            "file" => {
                let path = config
                    .paths
                    .embedding_vectors
                    .as_ref()
                    .expect("validate() requires a vector file for the file provider");
                Box::new(FileBackedProvider::from_path(path)?)
            }
            _ => Box::new(HashedNgramEmbedder::new(config.dedup.dimension)),
        };
        let boundaries = match config.dedup.band_boundaries {
            Some([low, medium]) => BandBoundaries {
                low_max: low,
                medium_max: medium,
            },
            None => BandBoundaries::thirds_of(config.dedup.threshold),
        };
        Ok(Resources {
            patterns,
            funnel,
            keywords,
            cleaner,
            segmenter,
            provider,
            boundaries,
        })
    }
}

fn open_lines(path: &Path) -> Result<std::io::BufReader<std::fs::File>, PipelineError> {
    let file = std::fs::File::open(path).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(std::io::BufReader::new(file))
}

/// Reads a `sentence_id<TAB>translation` file into a map.
///
/// Blank lines are skipped, translations are NFC-normalized, and duplicate
/// ids, missing tabs, or empty fields are errors.
pub fn load_translations(path: &Path) -> Result<BTreeMap<String, String>, PipelineError> {
    let error = |line: usize, reason: &str| PipelineError::Translations {
        path: path.display().to_string(),
        line,
        reason: reason.to_string(),
    };
    let mut map = BTreeMap::new();
    for (index, line) in open_lines(path)?.lines().enumerate() {
        let number = index + 1;
        let line = line.map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let (id, translation) = line
            .split_once('\t')
            .ok_or_else(|| error(number, "expected sentence_id<TAB>translation"))?;
        if id.is_empty() {
            return Err(error(number, "empty sentence id"));
        }
        if translation.trim().is_empty() {
            return Err(error(number, "empty translation"));
        }
        let normalized: String = translation.nfc().collect();
        if map.insert(id.to_string(), normalized).is_some() {
            return Err(error(number, &format!("duplicate sentence id {id:?}")));
        }
    }
    Ok(map)
}

/// Runs every stage and writes the corpus plus `run_report.json` into
/// `out_dir`.
pub fn run_pipeline(
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<PipelineOutcome, PipelineError> {
    config.validate()?;
    let resources = Resources::load(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| PipelineError::Threads(e.to_string()))?;
    pool.install(|| run_stages(config, &resources, out_dir))
}

fn run_stages(
    config: &PipelineConfig,
    resources: &Resources,
    out_dir: &Path,
) -> Result<PipelineOutcome, PipelineError> {
    let mut stages = Vec::new();

    // ingest
    let dump = &config.paths.article_dump;
    let parse_report = parse_article_stream(open_lines(dump)?).map_err(|source| {
        PipelineError::Io {
            path: dump.display().to_string(),
            source,
        }
    })?;
    stages.push(StageCounts::new(
        "ingest",
        parse_report.lines_read,
        parse_report.articles.len(),
        BTreeMap::from([
            ("blank_line".to_string(), parse_report.blank_lines),
            ("malformed_json".to_string(), parse_report.malformed),
            ("empty_body".to_string(), parse_report.empty_body),
            ("duplicate_id".to_string(), parse_report.duplicate_id),
            ("duplicate_url".to_string(), parse_report.duplicate_url),
        ]),
    ));

    // categorize
    let article_count = parse_report.articles.len();
    let categorized: Vec<(crate::model::Article, Category)> = parse_report
        .articles
        .into_iter()
        .filter_map(|article| {
            categorize(&article, &resources.funnel, &resources.keywords)
                .map(|category| (article, category))
        })
        .collect();
    stages.push(StageCounts::new(
        "categorize",
        article_count,
        categorized.len(),
        BTreeMap::from([(
            "uncategorized".to_string(),
            article_count - categorized.len(),
        )]),
    ));

    // segment
    let seeds: Vec<Seed> = categorized
        .par_iter()
        .map(|(article, category)| {
            split_sentences(&article.body, &resources.segmenter)
                .into_iter()
                .map(|text| Seed {
                    article_id: article.id.clone(),
                    category: *category,
                    text,
                })
                .collect::<Vec<Seed>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    stages.push(StageCounts::new(
        "segment",
        seeds.len(),
        seeds.len(),
        BTreeMap::new(),
    ));

    // clean
    let outcomes: Vec<CleanOutcome> = seeds
        .par_iter()
        .map(|seed| clean_pipeline(&seed.text, &resources.cleaner))
        .collect();
    let mut clean_rejections: BTreeMap<String, usize> = [
        Rejection::ForeignScript,
        Rejection::AdvertPhrase,
        Rejection::TooManySpecials,
        Rejection::EmptyAfterClean,
        Rejection::NoVerbEnding,
    ]
    .into_iter()
    .map(|r| (r.as_str().to_string(), 0))
    .collect();
    let mut cleaned: Vec<Seed> = Vec::with_capacity(seeds.len());
    for (seed, outcome) in seeds.into_iter().zip(outcomes) {
        match outcome {
            CleanOutcome::Cleaned(text) => cleaned.push(Seed { text, ..seed }),
            CleanOutcome::Rejected(rejection) => {
                *clean_rejections
                    .entry(rejection.as_str().to_string())
                    .or_insert(0) += 1;
            }
        }
    }
    let segmented_count: usize =
        cleaned.len() + clean_rejections.values().sum::<usize>();
    stages.push(StageCounts::new(
        "clean",
        segmented_count,
        cleaned.len(),
        clean_rejections,
    ));

    // annotate — cleaning guarantees the text contract, so a failure
    // here is a bug, not a data problem.
    let sentences: Vec<AnnotatedSentence> = cleaned
        .par_iter()
        .enumerate()
        .map(|(i, seed)| {
            annotate(
                format!("s{:06}", i + 1),
                seed.text.clone(),
                seed.category,
                &resources.patterns,
                Origin::Scraped,
                Some(seed.article_id.clone()),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    stages.push(StageCounts::new(
        "annotate",
        sentences.len(),
        sentences.len(),
        BTreeMap::new(),
    ));

    // exact_dedup
    let annotated_count = sentences.len();
    let (unique, dropped_exact) = exact_dedup(sentences);
    stages.push(StageCounts::new(
        "exact_dedup",
        annotated_count,
        unique.len(),
        BTreeMap::from([("exact_duplicate".to_string(), dropped_exact.len())]),
    ));

    // near_duplicates — filter per category, then band the survivors.
    let unique_count = unique.len();
    let mut by_category: BTreeMap<Category, Vec<AnnotatedSentence>> = BTreeMap::new();
    for sentence in unique {
        by_category.entry(sentence.category).or_default().push(sentence);
    }
    let mut dedup_reports: BTreeMap<String, DedupReport> = BTreeMap::new();
    let mut survivors: Vec<AnnotatedSentence> = Vec::with_capacity(unique_count);
    for (category, group) in by_category {
        let (kept, report) =
            semantic_filter(group, resources.provider.as_ref(), config.dedup.threshold)?;
        dedup_reports.insert(category.as_str().to_string(), report);
        survivors.extend(kept);
    }
    survivors.sort_by(|a, b| a.id.cmp(&b.id));
    let near_dropped = unique_count - survivors.len();
    assign_similarity_bands(
        &mut survivors,
        resources.provider.as_ref(),
        resources.boundaries,
    )?;
    stages.push(StageCounts::new(
        "near_duplicates",
        unique_count,
        survivors.len(),
        BTreeMap::from([("near_duplicate".to_string(), near_dropped)]),
    ));

    // sample — length limits apply first, then the optional quota draw.
    let sampling = config.sampling.total_requested;
    if sampling.is_some() && config.keep_below_min {
        log::warn!("keep_below_min is ignored when sampling: quota axes cover sampleable lengths only");
    }
    let survivor_count = survivors.len();
    let mut sample_rejections: BTreeMap<String, usize> =
        BTreeMap::from([("below_min".to_string(), 0), ("out_of_range".to_string(), 0)]);
    let keep_short = config.keep_below_min && sampling.is_none();
    let pool: Vec<AnnotatedSentence> = survivors
        .into_iter()
        .filter(|s| match s.length_class {
            LengthClass::OutOfRange => {
                *sample_rejections.get_mut("out_of_range").unwrap() += 1;
                false
            }
            LengthClass::BelowMin if !keep_short => {
                *sample_rejections.get_mut("below_min").unwrap() += 1;
                false
            }
            _ => true,
        })
        .collect();
    let (selected, quotas) = match sampling {
        Some(total) => {
            let spec = config.distribution_spec(total)?;
            let mut quotas = compute_targets(&pool, &spec)?;
            let ids = stratified_sample(&pool, &mut quotas, config.seed)?;
            let chosen: std::collections::HashSet<&str> =
                ids.iter().map(String::as_str).collect();
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
            sample_rejections.insert("not_selected".to_string(), not_selected);
            (selected, Some(quotas))
        }
        None => (pool, None),
    };
    stages.push(StageCounts::new(
        "sample",
        survivor_count,
        selected.len(),
        sample_rejections,
    ));

    // borrowed — pre-translated pairs join after filtering and quotas.
    let mut borrowed: Vec<(AnnotatedSentence, String)> = Vec::new();
    if let Some(path) = &config.paths.borrowed_pairs {
        let mut lines_read = 0usize;
        let mut rejections: BTreeMap<String, usize> = BTreeMap::from([
            ("blank_line".to_string(), 0),
            ("malformed_json".to_string(), 0),
            ("empty_translation".to_string(), 0),
            ("unknown_category".to_string(), 0),
        ]);
        let mut rows: Vec<BorrowedRow> = Vec::new();
        for line in open_lines(path)?.lines() {
            let line = line.map_err(|source| PipelineError::Io {
                path: path.display().to_string(),
                source,
            })?;
            lines_read += 1;
            if line.trim().is_empty() {
                *rejections.get_mut("blank_line").unwrap() += 1;
                continue;
            }
            match serde_json::from_str::<BorrowedRow>(&line) {
                Ok(row) => {
                    if row.tamang.trim().is_empty() {
                        *rejections.get_mut("empty_translation").unwrap() += 1;
                    } else {
                        rows.push(row);
                    }
                }
                Err(e) => {
                    log::warn!("skipping malformed borrowed pair line {lines_read}: {e}");
                    *rejections.get_mut("malformed_json").unwrap() += 1;
                }
            }
        }
        for (i, row) in rows.into_iter().enumerate() {
            let category = match row.category.as_deref() {
                Some(name) => match Category::parse(name) {
                    Some(category) => category,
                    None => {
                        log::warn!("borrowed pair with unknown category {name:?}");
                        *rejections.get_mut("unknown_category").unwrap() += 1;
                        continue;
                    }
                },
                None => Category::GeneralCommunication,
            };
            let nepali: String = row.nepali.nfc().collect();
            match clean_pipeline(&nepali, &resources.cleaner) {
                CleanOutcome::Cleaned(text) => {
                    let id = row.id.unwrap_or_else(|| format!("b{:06}", i + 1));
                    let sentence = annotate(
                        id,
                        text,
                        category,
                        &resources.patterns,
                        Origin::Borrowed,
                        None,
                    )?;
                    let tamang: String = row.tamang.nfc().collect();
                    borrowed.push((sentence, tamang));
                }
                CleanOutcome::Rejected(rejection) => {
                    *rejections.entry(rejection.as_str().to_string()).or_insert(0) += 1;
                }
            }
        }
        stages.push(StageCounts::new(
            "borrowed",
            lines_read,
            borrowed.len(),
            rejections,
        ));
    }

    // translate — build pairs and attach translations by sentence id.
    let translations = match &config.paths.translations {
        Some(path) => load_translations(path)?,
        None => BTreeMap::new(),
    };
    let mut pairs: Vec<ParallelPair> = Vec::with_capacity(selected.len() + borrowed.len());
    for sentence in selected {
        let tamang = translations.get(&sentence.id).cloned().unwrap_or_default();
        pairs.push(ParallelPair {
            id: String::new(),
            nepali: sentence,
            tamang,
            split: Split::Unassigned,
        });
    }
    for (sentence, tamang) in borrowed {
        pairs.push(ParallelPair {
            id: String::new(),
            nepali: sentence,
            tamang,
            split: Split::Unassigned,
        });
    }
    for (i, pair) in pairs.iter_mut().enumerate() {
        pair.id = format!("p{:06}", i + 1);
    }
    let untranslated = pairs.iter().filter(|p| p.tamang.is_empty()).count();
    stages.push(StageCounts::new(
        "translate",
        pairs.len(),
        pairs.len() - untranslated,
        BTreeMap::from([("untranslated".to_string(), untranslated)]),
    ));

    // split — only translated pairs are assigned; the rest stay
    // Unassigned but remain in the corpus.
    let mut translated: Vec<ParallelPair> = pairs
        .iter()
        .filter(|p| !p.tamang.is_empty())
        .cloned()
        .collect();
    let translated_count = translated.len();
    split_train_test(&mut translated, config.test_fraction, config.seed)?;
    let assignment: BTreeMap<&str, Split> = translated
        .iter()
        .map(|p| (p.id.as_str(), p.split))
        .collect();
    for pair in &mut pairs {
        if let Some(&split) = assignment.get(pair.id.as_str()) {
            pair.split = split;
        }
    }
    stages.push(StageCounts::new(
        "split",
        translated_count,
        translated_count,
        BTreeMap::new(),
    ));

    // emit
    let stats = corpus_stats(&pairs);
    let config_hash = config.config_hash();
    let manifest = CorpusManifest {
        pairs,
        stats,
        seed: config.seed,
        pipeline_config_hash: config_hash.clone(),
    };
    emit_manifest(&manifest, out_dir)?;
    let report = RunReport {
        seed: config.seed,
        config_hash: &config_hash,
        stages: &stages,
        dedup: &dedup_reports,
        quotas: quotas.as_ref().map(QuotaTable::rows),
    };
    let report_json =
        serde_json::to_string_pretty(&report).expect("run report serializes") + "\n";
    let report_path = out_dir.join("run_report.json");
    std::fs::write(&report_path, report_json).map_err(|source| PipelineError::Io {
        path: report_path.display().to_string(),
        source,
    })?;

    Ok(PipelineOutcome {
        manifest,
        stages,
        dedup: dedup_reports,
        quotas,
    })
}
