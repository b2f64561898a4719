//! Randomized invariant checks for the text-processing and numeric core.
//!
//! These complement the example-based unit tests: each property states a
//! contract that must hold for *any* input — cleaning is idempotent and
//! its output well-formed, segmentation never loses content, allocation
//! sums are conserved, metric scores stay in range, and the candidate
//! index agrees with a linear scan.

use proptest::prelude::*;

use nepcorpus::clean::{clean_pipeline, contains_foreign_script, CleanOutcome, CleanerConfig};
use nepcorpus::dedup::{
    cosine, exact_dedup, semantic_filter, CandidateIndex, EmbeddingProvider, HashedNgramEmbedder,
};
use nepcorpus::io::{read_cleaned, write_cleaned, CleanedRecord};
use nepcorpus::metrics::{bleu, chrf, chrf_pp, BleuConfig, ChrfConfig};
use nepcorpus::model::{AnnotatedSentence, Category, Origin, Polarity, SimilarityBand, Tense};
use nepcorpus::report::percent_tenths;
use nepcorpus::sample::largest_remainder;
use nepcorpus::segment::{split_sentences, tokenize_words, word_count, SegmenterConfig};

const LETTERS: &[char] = &[
    'क', 'ख', 'ग', 'घ', 'च', 'छ', 'ज', 'झ', 'ट', 'ठ', 'ड', 'त', 'थ', 'द', 'ध', 'न', 'प', 'फ',
    'ब', 'भ', 'म', 'य', 'र', 'ल', 'व', 'श', 'ष', 'स', 'ह',
];
const MARKS: &[char] = &['ा', 'ि', 'ी', 'ु', 'ू', 'े', 'ै', 'ो', 'ौ', 'ं', '्', 'ँ'];
const NOISE: &[char] = &[
    '।', '?', '!', ',', ':', '-', '_', '"', '\'', '(', ')', '…', '.', ' ', ' ', '०', '३', '7',
    '\u{200C}', '\u{200D}',
];

/// Messy but mostly-Devanagari text, the shape of scraped input.
fn raw_text() -> impl Strategy<Value = String> {
    let letter = proptest::sample::select(LETTERS.to_vec());
    let mark = proptest::sample::select(MARKS.to_vec());
    let noise = proptest::sample::select(NOISE.to_vec());
    let c = prop_oneof![4 => letter, 2 => mark, 1 => noise];
    proptest::collection::vec(c, 0..80).prop_map(|chars| chars.into_iter().collect())
}

/// A clean Devanagari word of 1–6 letters.
fn word() -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::sample::select(LETTERS.to_vec()), 1..6)
        .prop_map(|chars| chars.into_iter().collect())
}

/// A whitespace-separated sequence of words.
fn word_line(max_words: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(word(), 0..max_words).prop_map(|words| words.join(" "))
}

fn sentence_record(id: usize, text: &str) -> AnnotatedSentence {
    AnnotatedSentence {
        id: format!("s{id:06}"),
        text: text.to_string(),
        category: Category::GeneralCommunication,
        word_count: word_count(text),
        length_class: nepcorpus::annotate::classify_length(word_count(text)),
        tense: Tense::Unknown,
        polarity: Polarity::Unknown,
        similarity_band: SimilarityBand::Unassigned,
        source_article_id: None,
        origin: Origin::Scraped,
    }
}

fn non_whitespace(text: &str) -> String {
    text.chars().filter(|c| !c.is_whitespace()).collect()
}

proptest! {
    /// Cleaning its own output changes nothing.
    #[test]
    fn clean_is_idempotent(input in raw_text()) {
        let cfg = CleanerConfig::default();
        if let CleanOutcome::Cleaned(once) = clean_pipeline(&input, &cfg) {
            prop_assert_eq!(clean_pipeline(&once, &cfg), CleanOutcome::Cleaned(once));
        }
    }

    /// Accepted sentences satisfy the full output contract.
    #[test]
    fn clean_output_is_well_formed(input in raw_text()) {
        let cfg = CleanerConfig::default();
        if let CleanOutcome::Cleaned(out) = clean_pipeline(&input, &cfg) {
            let is_digit =
                |c: char| c.is_ascii_digit() || ('\u{0966}'..='\u{096F}').contains(&c);
            let has_digit = out.chars().any(is_digit);
            prop_assert!(!out.trim().is_empty());
            prop_assert!(!contains_foreign_script(&out));
            prop_assert!(!has_digit, "digit survived cleaning");
            prop_assert!(out
                .chars()
                .last()
                .map(|c| cfg.terminators.contains(&c))
                .unwrap_or(false));
            prop_assert_eq!(out.trim(), &out, "no surrounding whitespace");
            prop_assert!(!out.contains("  "), "no double spaces in {out:?}");
        }
    }

    /// Segmentation never drops or invents non-whitespace content.
    #[test]
    fn segmentation_preserves_content(input in raw_text()) {
        let cfg = SegmenterConfig::default();
        let joined: String = split_sentences(&input, &cfg).concat();
        prop_assert_eq!(non_whitespace(&joined), non_whitespace(&input));
    }

    /// All sentences but the last end with a terminator.
    #[test]
    fn segments_end_with_terminators(input in raw_text()) {
        let cfg = SegmenterConfig::default();
        let sentences = split_sentences(&input, &cfg);
        for s in sentences.iter().rev().skip(1) {
            let last = s.chars().last().unwrap();
            prop_assert!(cfg.terminators.contains(&last), "unterminated {s:?}");
        }
    }

    /// Tokenization sees through arbitrary whitespace runs.
    #[test]
    fn tokenization_ignores_whitespace_shape(
        words in proptest::collection::vec(word(), 0..10),
        pads in proptest::collection::vec("[ \\t]{1,4}", 0..10),
    ) {
        let plain = words.join(" ");
        let mut messy = String::new();
        for (i, w) in words.iter().enumerate() {
            messy.push_str(pads.get(i).map(String::as_str).unwrap_or("   "));
            messy.push_str(w);
        }
        messy.push_str("  ");
        prop_assert_eq!(tokenize_words(&plain), tokenize_words(&messy));
    }

    /// Integer apportionment conserves the total and stays within one
    /// item of every ideal share.
    #[test]
    fn apportionment_conserves_and_bounds(
        weights in proptest::collection::vec(0.0f64..100.0, 1..8),
        total in 0usize..300,
    ) {
        let alloc = largest_remainder(&weights, total);
        prop_assert_eq!(alloc.iter().sum::<usize>(), total);
        let sum: f64 = weights.iter().sum();
        if sum > 0.0 {
            for (a, w) in alloc.iter().zip(&weights) {
                let ideal = w / sum * total as f64;
                prop_assert!(
                    (*a as f64 - ideal).abs() < 1.0 + 1e-9,
                    "allocation {a} too far from ideal {ideal}"
                );
            }
        }
    }

    /// Every metric stays within [0, 100] and is never NaN.
    #[test]
    fn metric_scores_stay_in_range(
        pairs in proptest::collection::vec((word_line(8), word_line(8)), 1..6),
    ) {
        let hyps: Vec<&str> = pairs.iter().map(|(h, _)| h.as_str()).collect();
        let refs: Vec<&str> = pairs.iter().map(|(_, r)| r.as_str()).collect();
        for report in [
            bleu(&hyps, &refs, &BleuConfig::default()).unwrap(),
            chrf(&hyps, &refs, &ChrfConfig::default()).unwrap(),
            chrf_pp(&hyps, &refs).unwrap(),
        ] {
            prop_assert!(report.score.is_finite());
            prop_assert!((0.0..=100.0).contains(&report.score), "{}", report.score);
        }
    }

    /// Percentages are bounded by 100.0 and monotone in the count.
    #[test]
    fn percent_tenths_is_bounded_and_monotone(
        a in 0usize..5000,
        b in 0usize..5000,
        total in 1usize..5000,
    ) {
        let (lo, hi) = (a.min(b).min(total), a.max(b).min(total));
        prop_assert!(percent_tenths(hi, total) <= 1000);
        prop_assert!(percent_tenths(lo, total) <= percent_tenths(hi, total));
    }

    /// The candidate index returns exactly what a linear scan returns.
    #[test]
    fn index_agrees_with_linear_scan(
        raw in proptest::collection::vec(
            proptest::collection::vec(-1.0f64..1.0, 6),
            1..30,
        ),
        query_raw in proptest::collection::vec(-1.0f64..1.0, 6),
        cutoff in -1.0f64..1.0,
    ) {
        let normalize = |v: &[f64]| -> Option<Vec<f64>> {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            (norm > 1e-9).then(|| v.iter().map(|x| x / norm).collect())
        };
        let vectors: Vec<Vec<f64>> = raw.iter().filter_map(|v| normalize(v)).collect();
        prop_assume!(!vectors.is_empty());
        let Some(query) = normalize(&query_raw) else { return Ok(()) };

        let entries: Vec<(String, Vec<f64>)> = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (format!("v{i}"), v.clone()))
            .collect();
        let index = CandidateIndex::build(entries).unwrap();
        let got = index.query(&query, cutoff).unwrap();

        // A stable sort keeps insertion order on ties, matching the index.
        let mut expected: Vec<(String, f64)> = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (format!("v{i}"), cosine(&query, v).unwrap()))
            .filter(|(_, s)| *s > cutoff)
            .collect();
        expected.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        prop_assert_eq!(got, expected);
    }

    /// Exact deduplication conserves items and is idempotent.
    #[test]
    fn exact_dedup_conserves_and_is_idempotent(
        texts in proptest::collection::vec(word_line(5), 0..30),
    ) {
        let sentences: Vec<AnnotatedSentence> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| sentence_record(i, t))
            .collect();
        let n = sentences.len();
        let (kept, dropped) = exact_dedup(sentences);
        prop_assert_eq!(kept.len() + dropped.len(), n);
        let (again, dropped_again) = exact_dedup(kept.clone());
        prop_assert_eq!(again, kept);
        prop_assert!(dropped_again.is_empty());
    }

    /// Near-duplicate filtering is a fixpoint on its own output.
    #[test]
    fn semantic_filter_is_idempotent(
        texts in proptest::collection::vec(word_line(6), 1..12),
    ) {
        let embedder = HashedNgramEmbedder::new(64);
        let sentences: Vec<AnnotatedSentence> = texts
            .iter()
            .enumerate()
            .filter(|(_, t)| t.chars().count() >= 2)
            .map(|(i, t)| sentence_record(i, t))
            .collect();
        prop_assume!(!sentences.is_empty());
        let (kept, _) = semantic_filter(sentences, &embedder, 0.8).unwrap();
        let (kept_again, report) = semantic_filter(kept.clone(), &embedder, 0.8).unwrap();
        prop_assert_eq!(kept_again, kept);
        prop_assert!(report.dropped.is_empty());
    }

    /// Cleaned-record files round-trip exactly.
    #[test]
    fn cleaned_records_round_trip(
        rows in proptest::collection::vec((word_line(6), proptest::option::of("[a-z]{1,8}")), 0..20),
    ) {
        let records: Vec<CleanedRecord> = rows
            .iter()
            .enumerate()
            .map(|(i, (text, article))| CleanedRecord {
                id: format!("s{i:06}"),
                article_id: article.clone(),
                category: Category::Health,
                text: text.clone(),
            })
            .collect();
        let mut buffer = Vec::new();
        write_cleaned(&mut buffer, &records).unwrap();
        prop_assert_eq!(read_cleaned(buffer.as_slice()).unwrap(), records);
    }
}

/// The built-in embedder always produces unit vectors on real text.
#[test]
fn builtin_embedder_yields_unit_vectors() {
    let embedder = HashedNgramEmbedder::new(128);
    for text in ["नेपाल", "तामाङ भाषा", "क ख ग घ ङ", "यो एउटा लामो वाक्य हो।"] {
        let v = embedder.embed("t", text).unwrap();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-9, "norm {norm} for {text:?}");
    }
}
