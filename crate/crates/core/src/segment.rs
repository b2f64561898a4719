//! Sentence splitting and word tokenization for Devanagari text.
//!
//! The danda "।" is the primary sentence terminator; "?" and "!" are also
//! recognized by default. The ASCII full stop is deliberately not a
//! terminator — cleaning later normalizes terminal punctuation to danda.
//! There is no abbreviation handling: danda is unambiguous in a way "." is
//! not.

use std::collections::BTreeSet;

/// Default sentence terminators.
pub const DEFAULT_TERMINATORS: [char; 3] = ['।', '?', '!'];

/// Punctuation stripped from token edges before counting or classifying.
/// Includes the zero-width (non-)joiners that typing tools leave on word
/// boundaries.
pub const TOKEN_EDGE_PUNCT: [char; 13] = [
    '।', '?', '!', ',', '"', '\'', '-', '–', '(', ')', '…', '\u{200C}', '\u{200D}',
];

/// Configuration for [`split_sentences`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmenterConfig {
    /// Sentence-ending code points. Must be non-empty.
    pub terminators: BTreeSet<char>,
    /// Keep the terminator on each emitted sentence (default true).
    pub preserve_terminator: bool,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            terminators: DEFAULT_TERMINATORS.into_iter().collect(),
            preserve_terminator: true,
        }
    }
}

/// True when `text` ends with one of the default terminators.
pub fn ends_with_terminator(text: &str) -> bool {
    text.chars()
        .last()
        .is_some_and(|c| DEFAULT_TERMINATORS.contains(&c))
}

/// Splits text into sentences at terminator code points. Each output ends
/// with its terminator (under `preserve_terminator`); a trailing fragment
/// without one is emitted as the final element. Whitespace around sentences
/// is trimmed; no non-whitespace content is ever dropped.
pub fn split_sentences(text: &str, cfg: &SegmenterConfig) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if cfg.terminators.contains(&c) {
            if cfg.preserve_terminator {
                current.push(c);
            }
            let trimmed = current.trim();
            if !trimmed.is_empty() {
                sentences.push(trimmed.to_string());
            }
            current.clear();
        } else {
            current.push(c);
        }
    }
    let trimmed = current.trim();
    if !trimmed.is_empty() {
        sentences.push(trimmed.to_string());
    }
    sentences
}

/// Splits a sentence into word tokens: maximal non-whitespace runs with
/// leading/trailing punctuation stripped. Empty tokens are dropped. The
/// length of this list defines `word_count` everywhere downstream.
pub fn tokenize_words(sentence: &str) -> Vec<&str> {
    sentence
        .split_whitespace()
        .map(|t| t.trim_matches(|c| TOKEN_EDGE_PUNCT.contains(&c)))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Number of word tokens in a sentence.
pub fn word_count(sentence: &str) -> usize {
    tokenize_words(sentence).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_terminators() {
        let cfg = SegmenterConfig::default();
        assert_eq!(split_sentences("क ख। ग घ?", &cfg), vec!["क ख।", "ग घ?"]);
    }

    #[test]
    fn empty_input_yields_nothing() {
        assert_eq!(split_sentences("", &SegmenterConfig::default()), Vec::<String>::new());
        assert_eq!(split_sentences("   ", &SegmenterConfig::default()), Vec::<String>::new());
    }

    #[test]
    fn trailing_fragment_is_kept() {
        let cfg = SegmenterConfig::default();
        assert_eq!(split_sentences("क ख", &cfg), vec!["क ख"]);
        assert_eq!(split_sentences("क। ख ग", &cfg), vec!["क।", "ख ग"]);
    }

    #[test]
    fn terminator_can_be_dropped() {
        let cfg = SegmenterConfig {
            preserve_terminator: false,
            ..SegmenterConfig::default()
        };
        assert_eq!(split_sentences("क ख। ग घ?", &cfg), vec!["क ख", "ग घ"]);
    }

    #[test]
    fn no_non_whitespace_content_is_lost() {
        let cfg = SegmenterConfig::default();
        let input = "आज मौसम राम्रो छ। भोलि पानी पर्छ! के गर्ने? खै";
        let mut from_input: Vec<char> = input.chars().filter(|c| !c.is_whitespace()).collect();
        let mut from_output: Vec<char> = split_sentences(input, &cfg)
            .join("")
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        from_input.sort_unstable();
        from_output.sort_unstable();
        assert_eq!(from_input, from_output);
    }

    #[test]
    fn tokenizes_and_strips_punctuation() {
        assert_eq!(
            tokenize_words("आजको मौसम राम्रो छ।"),
            vec!["आजको", "मौसम", "राम्रो", "छ"]
        );
        assert_eq!(tokenize_words("क, ख।"), vec!["क", "ख"]);
        assert_eq!(tokenize_words("   "), Vec::<&str>::new());
        assert_eq!(tokenize_words("(क) 'ख' –"), vec!["क", "ख"]);
    }

    #[test]
    fn tokenization_ignores_surrounding_whitespace() {
        assert_eq!(tokenize_words("क ख।"), tokenize_words("  क ख।  "));
        assert_eq!(word_count("क ख।"), 2);
    }

    #[test]
    fn zero_width_joiners_are_stripped_from_token_edges() {
        // "छन्" followed by a zero-width non-joiner, as typing tools emit it.
        let tokens = tokenize_words("उनीहरू आउँछन्\u{200C}।");
        assert_eq!(tokens, vec!["उनीहरू", "आउँछन्"]);
    }
}
