//! Rule-based tense, polarity, and length classification.
//!
//! Tense and polarity are read off the sentence's final word token by
//! longest-suffix matching over the pattern tables: among all table entries
//! that are code-point suffixes of the token, the longest decides the class.
//! Auxiliary verbs are checked first by whole-token equality, and a negative
//! prefix on the final token (with a verb-suffixed remainder) forces
//! Negative polarity regardless of which set the suffix came from.
//!
//! Matching operates on raw code points — a dependent vowel sign is not the
//! independent vowel letter — so the tables apply exactly as written. Both
//! classifiers are total: any Unicode string yields a class, with `Unknown`
//! for no match.

use thiserror::Error;

use crate::clean;
use crate::model::{AnnotatedSentence, Category, LengthClass, Origin, Polarity, SimilarityBand, Tense};
use crate::patterns::PatternTable;
use crate::segment;

/// Errors from [`annotate`].
#[derive(Debug, Error)]
pub enum AnnotateError {
    /// The text does not satisfy the cleaner's output contract.
    #[error("sentence {id:?} is not cleaned text: {reason}")]
    UncleanedText { id: String, reason: String },
}

/// The last word token of a sentence (terminators and edge punctuation
/// stripped); `None` when the sentence has no tokens.
pub fn final_verb_token(sentence: &str) -> Option<&str> {
    segment::tokenize_words(sentence).into_iter().last()
}

/// Devanagari combining marks (vowel signs, virama, nasalization marks).
/// A negative prefix candidate is only a real prefix when the remainder
/// starts with a base character: if stripping "न" exposes a combining mark,
/// the "न" was the base consonant of the first syllable, not a morpheme.
fn is_devanagari_combining_mark(c: char) -> bool {
    matches!(c,
        '\u{0900}'..='\u{0902}'
        | '\u{093A}'..='\u{093C}'
        | '\u{093E}'..='\u{094F}'
        | '\u{0951}'..='\u{0957}'
        | '\u{0962}'..='\u{0963}')
}

/// The longest entry of `lists` (each paired with its class) that is a
/// code-point suffix of `token`.
fn longest_suffix_match<'a, C: Copy>(token: &str, lists: &[(&'a [String], C)]) -> Option<(&'a str, C)> {
    let mut best: Option<(&str, C)> = None;
    for (entries, class) in lists {
        for entry in entries.iter() {
            if token.ends_with(entry.as_str()) {
                let longer = match best {
                    None => true,
                    Some((b, _)) => entry.chars().count() > b.chars().count(),
                };
                if longer {
                    best = Some((entry.as_str(), *class));
                }
            }
        }
    }
    best
}

/// Classifies the tense of a sentence from its final token: auxiliary verbs
/// by equality first, then the longest matching suffix from either tense
/// set, else `Unknown`.
pub fn classify_tense(sentence: &str, tables: &PatternTable) -> Tense {
    let Some(token) = final_verb_token(sentence) else {
        return Tense::Unknown;
    };
    if tables.past_auxiliaries().iter().any(|a| token == a) {
        return Tense::Past;
    }
    if tables.nonpast_auxiliaries().iter().any(|a| token == a) {
        return Tense::NonPast;
    }
    match longest_suffix_match(
        token,
        &[
            (tables.nonpast_suffixes(), Tense::NonPast),
            (tables.past_suffixes(), Tense::Past),
        ],
    ) {
        Some((_, tense)) => tense,
        None => Tense::Unknown,
    }
}

/// Classifies the polarity of a sentence from its final token. A negative
/// prefix whose remainder still matches a verb suffix forces `Negative`;
/// otherwise the longest matching suffix across the affirmative and negative
/// sets decides; else `Unknown`.
pub fn classify_polarity(sentence: &str, tables: &PatternTable) -> Polarity {
    let Some(token) = final_verb_token(sentence) else {
        return Polarity::Unknown;
    };
    let lists: [(&[String], Polarity); 2] = [
        (tables.affirmative_suffixes(), Polarity::Affirmative),
        (tables.negative_suffixes(), Polarity::Negative),
    ];
    if let Some(rest) = token.strip_prefix(tables.negative_prefix()) {
        let starts_with_base = rest
            .chars()
            .next()
            .is_some_and(|c| !is_devanagari_combining_mark(c));
        if starts_with_base && longest_suffix_match(rest, &lists).is_some() {
            return Polarity::Negative;
        }
    }
    match longest_suffix_match(token, &lists) {
        Some((_, polarity)) => polarity,
        None => Polarity::Unknown,
    }
}

/// The unique length bucket for a word count.
pub fn classify_length(word_count: usize) -> LengthClass {
    LengthClass::from_word_count(word_count)
}

/// Builds a fully classified sentence record from cleaned text.
///
/// The text must already satisfy the cleaner's output contract (no Latin
/// letters, no digits, terminator-final, non-empty); violations are errors
/// because classification quality is undefined on raw text. The similarity
/// band starts `Unassigned` — deduplication assigns it later.
pub fn annotate(
    id: impl Into<String>,
    text: impl Into<String>,
    category: Category,
    tables: &PatternTable,
    origin: Origin,
    source_article_id: Option<String>,
) -> Result<AnnotatedSentence, AnnotateError> {
    let id = id.into();
    let text = text.into();
    let reason = if text.trim().is_empty() {
        Some("empty text")
    } else if clean::contains_foreign_script(&text) {
        Some("contains Basic-Latin letters")
    } else if text.chars().any(|c| c.is_ascii_digit() || ('\u{0966}'..='\u{096F}').contains(&c)) {
        Some("contains digits")
    } else if !segment::ends_with_terminator(&text) {
        Some("does not end with a sentence terminator")
    } else {
        None
    };
    if let Some(reason) = reason {
        return Err(AnnotateError::UncleanedText {
            id,
            reason: reason.to_string(),
        });
    }
    let word_count = segment::word_count(&text);
    let tense = classify_tense(&text, tables);
    let polarity = classify_polarity(&text, tables);
    Ok(AnnotatedSentence {
        id,
        category,
        word_count,
        length_class: classify_length(word_count),
        tense,
        polarity,
        similarity_band: SimilarityBand::Unassigned,
        source_article_id,
        origin,
        text,
    })
}
