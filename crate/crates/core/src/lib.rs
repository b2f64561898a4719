//! Deterministic construction toolkit for a Nepali–Tamang parallel corpus.
//!
//! The crate turns a line-delimited dump of scraped news articles into a
//! sentence-aligned, annotated parallel corpus through a fixed stage order:
//!
//! 1. [`ingest`] — parse article records, de-duplicate URLs, resolve each
//!    article to one of five categories via a layered rule funnel plus a
//!    keyword map.
//! 2. [`segment`] — split Devanagari bodies into sentences and word tokens.
//! 3. [`clean`] — normalize or reject each sentence (foreign script, noise,
//!    location prefixes, verb-final filter).
//! 4. [`annotate`] — classify tense and polarity by longest-suffix matching
//!    over verb pattern tables, and bucket sentence length.
//! 5. [`dedup`] — drop exact repeats, then near-duplicates above a cosine
//!    similarity threshold using a pluggable embedding provider.
//! 6. [`sample`] — stratified selection toward target distributions and a
//!    deterministic train/test split.
//! 7. [`report`] — distribution statistics and manifest emission.
//!
//! [`metrics`] implements corpus-level BLEU, chrF, and chrF++ from their
//! standard definitions for scoring translation output against references.
//!
//! Every stage is pure or seeded: one configured seed drives named substreams
//! per stage, so identical inputs and config produce byte-identical outputs
//! regardless of thread count.

pub mod annotate;
pub mod clean;
pub mod config;
pub mod dedup;
pub mod ingest;
pub mod io;
pub mod metrics;
pub mod model;
pub mod patterns;
pub mod pipeline;
pub mod report;
pub mod sample;
pub mod segment;

pub use annotate::{annotate, classify_length, classify_polarity, classify_tense, final_verb_token};
pub use clean::{clean_pipeline, CleanOutcome, CleanerConfig, Rejection};
pub use config::PipelineConfig;
pub use dedup::{cosine, exact_dedup, semantic_filter, DedupReport, EmbeddingProvider};
pub use metrics::{bleu, chrf, chrf_pp, BleuConfig, ChrfConfig, MetricReport};
pub use model::{
    AnnotatedSentence, Article, Category, CorpusManifest, LengthClass, Origin, ParallelPair,
    Polarity, SimilarityBand, Split, Tense,
};
pub use patterns::PatternTable;
pub use pipeline::{run_pipeline, PipelineOutcome, StageCounts};
pub use report::{corpus_stats, emit_manifest, load_manifest, DistributionTable};
pub use sample::{
    compute_targets, largest_remainder, split_train_test, stratified_sample, DistributionSpec,
    QuotaTable,
};
pub use segment::{split_sentences, tokenize_words, word_count, SegmenterConfig};
