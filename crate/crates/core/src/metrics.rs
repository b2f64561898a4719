//! Corpus BLEU, chrF, and chrF++ for evaluating translations.
//!
//! BLEU is corpus-level: clipped n-gram matches and totals are summed over
//! all segments per order (default 1..4) and combined as a geometric mean
//! of order precisions times a brevity penalty. Orders with no n-grams
//! anywhere in the corpus are dropped from the mean, so `score(x, x)` is
//! exactly 100 even for corpora shorter than the maximum order. With
//! exponential smoothing, a running baseline starts at 1 and doubles at
//! each zero-match order, which then scores `1/(baseline * total)`.
//!
//! chrF is segment-level, macro-averaged: character n-grams (orders 1..6)
//! are taken over the whitespace-removed code-point stream; an order
//! participates only when both sides have at least one n-gram of that
//! size; precision and recall are averaged over participating orders and
//! combined with F-beta (beta = 2). chrF++ adds word n-grams of orders
//! 1..2 to the same per-order average.
//!
//! Scores are on the 0..100 scale. All accumulation is sequential left to
//! right, so results are bit-stable across runs and thread counts.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;
use thiserror::Error;

/// Errors from metric computation.
#[derive(Debug, Error)]
pub enum MetricsError {
    /// Hypothesis and reference lists differ in length.
    #[error("{hypotheses} hypotheses vs {references} references")]
    LengthMismatch { hypotheses: usize, references: usize },
    /// No segments were given.
    #[error("cannot score an empty corpus")]
    Empty,
}

/// How hypothesis and reference text is split into tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tokenization {
    /// Split on Unicode whitespace; no further normalization.
    Whitespace,
}

/// Zero-match handling for BLEU order precisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Smoothing {
    /// A zero-match order zeroes the whole score.
    None,
    /// Each zero-match order scores `1/(baseline * total)` with a baseline
    /// that starts at 1 and doubles per zero-match order.
    Exponential,
}

/// BLEU settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuConfig {
    /// Highest n-gram order (default 4).
    pub max_ngram_order: usize,
    pub smoothing: Smoothing,
    pub tokenization: Tokenization,
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self {
            max_ngram_order: 4,
            smoothing: Smoothing::Exponential,
            tokenization: Tokenization::Whitespace,
        }
    }
}

/// chrF settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChrfConfig {
    /// Highest character n-gram order (default 6).
    pub char_order: usize,
    /// Highest word n-gram order (0 disables word n-grams; 2 gives chrF++).
    pub word_order: usize,
    /// Recall weight in the F-score (default 2).
    pub beta: f64,
}

impl Default for ChrfConfig {
    fn default() -> Self {
        Self {
            char_order: 6,
            word_order: 0,
            beta: 2.0,
        }
    }
}

impl ChrfConfig {
    /// The chrF++ variant: chrF plus word n-grams up to order 2.
    pub fn plus_plus() -> Self {
        Self {
            word_order: 2,
            ..Self::default()
        }
    }
}

/// A computed score with enough context to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    /// Metric name: "bleu", "chrf", or "chrf++".
    pub metric: String,
    /// Score on the 0..100 scale.
    pub score: f64,
    /// Stable encoding of the settings that produced the score.
    pub signature: String,
    /// Number of hypothesis/reference segments scored.
    pub sentence_count: usize,
}

fn check_lengths<H, R>(hyps: &[H], refs: &[R]) -> Result<(), MetricsError> {
    if hyps.len() != refs.len() {
        return Err(MetricsError::LengthMismatch {
            hypotheses: hyps.len(),
            references: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

/// Counts of each n-gram (as a subslice) in `seq`.
fn ngram_counts<T: Eq + Hash>(seq: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if n > 0 && seq.len() >= n {
        for window in seq.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// Total hypothesis n-grams also present in the reference, each clipped to
/// its reference count.
fn clipped_matches<T: Eq + Hash>(
    hyp: &HashMap<&[T], usize>,
    reference: &HashMap<&[T], usize>,
) -> usize {
    hyp.iter()
        .map(|(gram, &count)| count.min(reference.get(gram).copied().unwrap_or(0)))
        .sum()
}

/// Corpus-level BLEU of `hyps` against `refs` (same length, paired by
/// index).
pub fn bleu<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
    config: &BleuConfig,
) -> Result<MetricReport, MetricsError> {
    check_lengths(hyps, refs)?;
    let max_order = config.max_ngram_order.max(1);
    let mut correct = vec![0usize; max_order];
    let mut total = vec![0usize; max_order];
    let mut hyp_len = 0usize;
    let mut ref_len = 0usize;
    for (hyp, reference) in hyps.iter().zip(refs) {
        let Tokenization::Whitespace = config.tokenization;
        let h: Vec<&str> = hyp.as_ref().split_whitespace().collect();
        let r: Vec<&str> = reference.as_ref().split_whitespace().collect();
        hyp_len += h.len();
        ref_len += r.len();
        for n in 1..=max_order {
            let hg = ngram_counts(&h, n);
            let rg = ngram_counts(&r, n);
            correct[n - 1] += clipped_matches(&hg, &rg);
            total[n - 1] += h.len().saturating_sub(n - 1);
        }
    }
    let mut score = 0.0;
    if hyp_len > 0 {
        let mut log_sum = 0.0;
        let mut effective = 0usize;
        let mut smooth = 1.0f64;
        let mut zeroed = false;
        for n in 0..max_order {
            if total[n] == 0 {
                continue; // the corpus has no n-grams of this order at all
            }
            effective += 1;
            let p = if correct[n] > 0 {
                correct[n] as f64 / total[n] as f64
            } else {
                match config.smoothing {
                    Smoothing::None => {
                        zeroed = true;
                        break;
                    }
                    Smoothing::Exponential => {
                        smooth *= 2.0;
                        1.0 / (smooth * total[n] as f64)
                    }
                }
            };
            log_sum += p.ln();
        }
        if effective > 0 && !zeroed {
            let brevity = if hyp_len >= ref_len {
                1.0
            } else {
                (1.0 - ref_len as f64 / hyp_len as f64).exp()
            };
            score = brevity * (log_sum / effective as f64).exp() * 100.0;
        }
    }
    Ok(MetricReport {
        metric: "bleu".to_string(),
        score,
        signature: format!(
            "bleu|o{}|{}|tok-ws",
            max_order,
            match config.smoothing {
                Smoothing::None => "smooth-none",
                Smoothing::Exponential => "smooth-exp",
            }
        ),
        sentence_count: hyps.len(),
    })
}

/// Adds one n-gram order's precision and recall to the running sums when
/// both sides have n-grams of that size.
fn accumulate_order<T: Eq + Hash>(
    hyp: &[T],
    reference: &[T],
    n: usize,
    precision_sum: &mut f64,
    recall_sum: &mut f64,
    used: &mut usize,
) {
    let hg = ngram_counts(hyp, n);
    let rg = ngram_counts(reference, n);
    let hyp_total: usize = hg.values().sum();
    let ref_total: usize = rg.values().sum();
    if hyp_total == 0 || ref_total == 0 {
        return;
    }
    let matches = clipped_matches(&hg, &rg) as f64;
    *precision_sum += matches / hyp_total as f64;
    *recall_sum += matches / ref_total as f64;
    *used += 1;
}

/// The chrF F-score of one segment pair, in [0, 1].
fn segment_chrf(hyp: &str, reference: &str, config: &ChrfConfig) -> f64 {
    let h_chars: Vec<char> = hyp.split_whitespace().collect::<String>().chars().collect();
    let r_chars: Vec<char> = reference
        .split_whitespace()
        .collect::<String>()
        .chars()
        .collect();
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    let mut used = 0usize;
    for n in 1..=config.char_order {
        accumulate_order(&h_chars, &r_chars, n, &mut precision_sum, &mut recall_sum, &mut used);
    }
    if config.word_order > 0 {
        let h_words: Vec<&str> = hyp.split_whitespace().collect();
        let r_words: Vec<&str> = reference.split_whitespace().collect();
        for n in 1..=config.word_order {
            accumulate_order(&h_words, &r_words, n, &mut precision_sum, &mut recall_sum, &mut used);
        }
    }
    if used == 0 {
        return 0.0;
    }
    let precision = precision_sum / used as f64;
    let recall = recall_sum / used as f64;
    if precision + recall == 0.0 {
        return 0.0;
    }
    let b2 = config.beta * config.beta;
    (1.0 + b2) * precision * recall / (b2 * precision + recall)
}

fn chrf_impl<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
    config: &ChrfConfig,
    name: &str,
) -> Result<MetricReport, MetricsError> {
    check_lengths(hyps, refs)?;
    let mut sum = 0.0;
    for (hyp, reference) in hyps.iter().zip(refs) {
        sum += segment_chrf(hyp.as_ref(), reference.as_ref(), config);
    }
    Ok(MetricReport {
        metric: name.to_string(),
        score: sum / hyps.len() as f64 * 100.0,
        signature: format!(
            "{name}|c{}|w{}|b{}",
            config.char_order, config.word_order, config.beta
        ),
        sentence_count: hyps.len(),
    })
}

/// Macro-averaged chrF of `hyps` against `refs`.
pub fn chrf<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
    config: &ChrfConfig,
) -> Result<MetricReport, MetricsError> {
    chrf_impl(hyps, refs, config, if config.word_order > 0 { "chrf++" } else { "chrf" })
}

/// Macro-averaged chrF++ (chrF with word n-grams up to order 2).
pub fn chrf_pp<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
) -> Result<MetricReport, MetricsError> {
    chrf_impl(hyps, refs, &ChrfConfig::plus_plus(), "chrf++")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn bleu_hand_computed_anchor() {
        // p1 = 2/3, p2 = 1/2, p3 smoothed to 1/2, order 4 dropped:
        // 100 * (2/3 * 1/2 * 1/2)^(1/3).
        let report = bleu(&["क ख ग"], &["क ख घ"], &BleuConfig::default()).unwrap();
        close(report.score, 100.0 * (1.0f64 / 6.0).powf(1.0 / 3.0));
        assert_eq!(report.sentence_count, 1);
    }

    #[test]
    fn bleu_identity_is_exactly_100_even_for_short_corpora() {
        let report = bleu(&["क ख"], &["क ख"], &BleuConfig::default()).unwrap();
        assert_eq!(report.score, 100.0);
        let long = "क ख ग घ ङ च छ ज";
        let report = bleu(&[long], &[long], &BleuConfig::default()).unwrap();
        assert_eq!(report.score, 100.0);
    }

    #[test]
    fn bleu_without_smoothing_zeroes_on_a_missed_order() {
        let config = BleuConfig {
            smoothing: Smoothing::None,
            ..BleuConfig::default()
        };
        let report = bleu(&["क ख ग"], &["क ख घ"], &config).unwrap();
        assert_eq!(report.score, 0.0);
    }

    #[test]
    fn bleu_brevity_penalty_applies_only_when_short() {
        // Hypothesis is a strict prefix: all precisions 1, penalized.
        let hyp = "क ख ग";
        let reference = "क ख ग घ";
        let penalized = bleu(&[hyp], &[reference], &BleuConfig::default()).unwrap();
        close(penalized.score, 100.0 * (1.0f64 - 4.0 / 3.0).exp());
        // Hypothesis longer than the reference: no penalty.
        let report = bleu(&[reference], &[hyp], &BleuConfig::default()).unwrap();
        assert!(report.score < 100.0); // precision loss, not BP
    }

    #[test]
    fn bleu_empty_hypotheses_score_zero() {
        let report = bleu(&[""], &["क ख"], &BleuConfig::default()).unwrap();
        assert_eq!(report.score, 0.0);
    }

    #[test]
    fn length_mismatch_and_empty_are_errors() {
        assert!(matches!(
            bleu(&["क"], &["क", "ख"], &BleuConfig::default()),
            Err(MetricsError::LengthMismatch { hypotheses: 1, references: 2 })
        ));
        let none: [&str; 0] = [];
        assert!(matches!(
            bleu(&none, &none, &BleuConfig::default()),
            Err(MetricsError::Empty)
        ));
        assert!(chrf(&none, &none, &ChrfConfig::default()).is_err());
    }

    #[test]
    fn chrf_hand_computed_anchor() {
        // Char o1: P=2/3 R=1; o2: P=1/2 R=1; others skipped.
        // avgP = 7/12, avgR = 1, F2 = 0.875.
        let report = chrf(&["कखग"], &["कख"], &ChrfConfig::default()).unwrap();
        close(report.score, 87.5);
        assert_eq!(report.metric, "chrf");
    }

    #[test]
    fn chrf_pp_adds_word_orders() {
        // Word o1 participates with P=R=0; word o2 skipped on both sides.
        let report = chrf_pp(&["कखग"], &["कख"]).unwrap();
        close(report.score, 175.0 / 3.0);
        assert_eq!(report.metric, "chrf++");
    }

    #[test]
    fn chrf_identity_is_100_and_disjoint_is_0() {
        let text = "आजको मौसम राम्रो छ।";
        close(chrf(&[text], &[text], &ChrfConfig::default()).unwrap().score, 100.0);
        close(chrf_pp(&[text], &[text]).unwrap().score, 100.0);
        close(chrf_pp(&["क"], &["क"]).unwrap().score, 100.0);
        assert_eq!(chrf(&["कख"], &["गघ"], &ChrfConfig::default()).unwrap().score, 0.0);
    }

    #[test]
    fn chrf_ignores_whitespace_for_character_ngrams() {
        // Same character stream, different spacing: chrF (no word orders)
        // sees identical text.
        let a = "कख गघ";
        let b = "क खग घ";
        close(chrf(&[a], &[b], &ChrfConfig::default()).unwrap().score, 100.0);
    }

    #[test]
    fn scores_match_the_frozen_goldens() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests")
            .join("fixtures")
            .join("metrics");
        let hyp = std::fs::read_to_string(dir.join("hyp.txt")).unwrap();
        let reference = std::fs::read_to_string(dir.join("ref.txt")).unwrap();
        let hyps: Vec<&str> = hyp.lines().collect();
        let refs: Vec<&str> = reference.lines().collect();
        let golden: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join("golden.json")).unwrap())
                .unwrap();
        assert_eq!(hyps.len(), golden["pairs"].as_u64().unwrap() as usize);
        let b = bleu(&hyps, &refs, &BleuConfig::default()).unwrap().score;
        let c = chrf(&hyps, &refs, &ChrfConfig::default()).unwrap().score;
        let cpp = chrf_pp(&hyps, &refs).unwrap().score;
        close(b, golden["bleu"].as_f64().unwrap());
        close(c, golden["chrf"].as_f64().unwrap());
        close(cpp, golden["chrf_pp"].as_f64().unwrap());
    }

    #[test]
    fn scores_stay_in_range_on_arbitrary_inputs() {
        let samples = [
            "", "क", "क क क क", "a b c", "॥ — …", "क ख ग घ ङ च छ ज झ ञ",
        ];
        for h in &samples {
            for r in &samples {
                for report in [
                    bleu(&[*h], &[*r], &BleuConfig::default()).unwrap(),
                    chrf(&[*h], &[*r], &ChrfConfig::default()).unwrap(),
                    chrf_pp(&[*h], &[*r]).unwrap(),
                ] {
                    assert!(
                        (0.0..=100.0).contains(&report.score),
                        "{} out of range on {h:?}/{r:?}: {}",
                        report.metric,
                        report.score
                    );
                }
            }
         }
    }
}
