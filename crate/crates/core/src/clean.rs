//! Sentence cleaning: normalization rules plus typed rejections.
//!
//! A sentence either comes out normalized (digits, adverts, ellipses, outer
//! quotes, and leading markers removed; whitespace collapsed; terminal danda
//! ensured) or is rejected with a reason. The pipeline is a fixpoint:
//! cleaning an already-cleaned sentence returns it unchanged, which several
//! internal steps are specifically shaped to guarantee (noise removal loops
//! until stable, and the location-prefix strip is reapplied until no prefix
//! remains).
//!
//! Rule order is fixed and matters for rejection attribution: the foreign
//! script check runs before any mutation so Latin content is reported as
//! such; emptiness is decided after all removals so a sentence that *was* an
//! advert reports `AdvertPhrase` rather than `NoVerbEnding`.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;

use crate::patterns::PatternTable;
use crate::segment::{self, DEFAULT_TERMINATORS};

/// Why a sentence was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rejection {
    /// Contains Basic-Latin letters.
    ForeignScript,
    /// Nothing left after removing an advertisement phrase.
    AdvertPhrase,
    /// More special characters than the configured maximum.
    TooManySpecials,
    /// Nothing left after noise removal.
    EmptyAfterClean,
    /// Final token matches no verb pattern.
    NoVerbEnding,
}

impl Rejection {
    /// Stable snake_case key used in stage-count reports.
    pub fn as_str(self) -> &'static str {
        match self {
            Rejection::ForeignScript => "foreign_script",
            Rejection::AdvertPhrase => "advert_phrase",
            Rejection::TooManySpecials => "too_many_specials",
            Rejection::EmptyAfterClean => "empty_after_clean",
            Rejection::NoVerbEnding => "no_verb_ending",
        }
    }
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of [`clean_pipeline`]: exactly one branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CleanOutcome {
    Cleaned(String),
    Rejected(Rejection),
}

impl CleanOutcome {
    pub fn cleaned(&self) -> Option<&str> {
        match self {
            CleanOutcome::Cleaned(s) => Some(s),
            CleanOutcome::Rejected(_) => None,
        }
    }

    pub fn rejection(&self) -> Option<Rejection> {
        match self {
            CleanOutcome::Cleaned(_) => None,
            CleanOutcome::Rejected(r) => Some(*r),
        }
    }
}

/// Verb patterns for the verb-final filter: suffixes matched at the end of
/// the final token, plus auxiliaries matched by whole-token equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbPatterns {
    pub suffixes: Vec<String>,
    pub auxiliaries: Vec<String>,
}

impl VerbPatterns {
    /// Builds the filter set from a pattern table: all tense suffixes, the
    /// negative inflection forms, and the auxiliary verbs.
    pub fn from_table(table: &PatternTable) -> VerbPatterns {
        VerbPatterns {
            suffixes: table.verb_final_suffixes(),
            auxiliaries: table.auxiliaries(),
        }
    }
}

/// Cleaning configuration. [`CleanerConfig::default`] carries the built-in
/// advert phrase, typo fix, separators, and verb patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct CleanerConfig {
    /// Exact phrases removed wherever they appear (advertisement banners).
    pub advert_phrases: Vec<String>,
    /// Ordered (find, replace) pairs for known typographical errors.
    pub typo_fixes: Vec<(String, String)>,
    /// Separator characters that end a leading location marker.
    pub prefix_separators: Vec<char>,
    /// Maximum tokens a location prefix may span.
    pub max_prefix_tokens: usize,
    /// Maximum special characters tolerated after noise removal.
    pub max_special_chars: usize,
    /// Verb-final filter patterns.
    pub verb: VerbPatterns,
    /// Sentence terminators (matches the segmenter's set).
    pub terminators: BTreeSet<char>,
}

impl Default for CleanerConfig {
    fn default() -> Self {
        CleanerConfig {
            advert_phrases: vec!["सूचना तथा सुझाव".to_string()],
            typo_fixes: vec![("न््".to_string(), "न्".to_string())],
            prefix_separators: vec![':', '–', '-'],
            max_prefix_tokens: 3,
            max_special_chars: 5,
            verb: VerbPatterns::from_table(PatternTable::builtin()),
            terminators: DEFAULT_TERMINATORS.into_iter().collect(),
        }
    }
}

/// Quotation marks stripped from sentence edges (inner quotes are kept).
const OUTER_QUOTES: [char; 8] = ['"', '\'', '“', '”', '‘', '’', '«', '»'];

/// Characters stripped from the start of a sentence (stray list markers and
/// separator debris).
const LEADING_JUNK: [char; 3] = ['-', ':', '_'];

/// True iff the sentence contains any Basic-Latin letter. This is the
/// foreign-script test: a character-class rule rather than language
/// identification, so it is deterministic and cheap.
pub fn contains_foreign_script(sentence: &str) -> bool {
    sentence.chars().any(|c| c.is_ascii_alphabetic())
}

fn is_devanagari_digit(c: char) -> bool {
    ('\u{0966}'..='\u{096F}').contains(&c)
}

/// Letter-like code points: anything alphabetic, plus the Devanagari block
/// minus its punctuation and digits (so vowel signs and other combining
/// marks count as word content).
fn is_letter_like(c: char) -> bool {
    if c.is_alphabetic() {
        return true;
    }
    ('\u{0900}'..='\u{097F}').contains(&c) && !('\u{0964}'..='\u{096F}').contains(&c)
}

fn ellipsis_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\.{3,}").expect("static regex"))
}

fn space_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\s+").expect("static regex"))
}

fn before_danda_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[\s,]+।").expect("static regex"))
}

/// Removes one leading `words + separator` prefix (a location marker such as
/// a city name followed by ":" or "–") when the prefix spans at most
/// `max_prefix_tokens` tokens and the separator is followed by whitespace.
/// Returns the input unchanged otherwise. The full pipeline reapplies this
/// until stable, so stacked markers cannot survive one cleaning pass.
pub fn strip_location_prefix(sentence: &str, cfg: &CleanerConfig) -> String {
    let mut tokens_seen = 0usize;
    let mut in_token = false;
    let chars: Vec<(usize, char)> = sentence.char_indices().collect();
    for (pos, &(byte_idx, c)) in chars.iter().enumerate() {
        if c.is_whitespace() {
            in_token = false;
            continue;
        }
        // A prefix never spans a sentence boundary.
        if cfg.terminators.contains(&c) {
            return sentence.to_string();
        }
        if cfg.prefix_separators.contains(&c) {
            let followed_by_space = chars
                .get(pos + 1)
                .map(|&(_, next)| next.is_whitespace())
                .unwrap_or(false);
            // `tokens_seen` already includes a token the separator is glued
            // to ("काठमाडौं:"), because the token was counted at its start.
            if followed_by_space && tokens_seen >= 1 && tokens_seen <= cfg.max_prefix_tokens {
                let rest = sentence[byte_idx + c.len_utf8()..].trim_start();
                return rest.to_string();
            }
            // A separator glued to the following word ("राम-सीता") is word
            // content, not a marker; keep scanning.
        }
        if !in_token {
            tokens_seen += 1;
            if tokens_seen > cfg.max_prefix_tokens {
                return sentence.to_string();
            }
            in_token = true;
        }
    }
    sentence.to_string()
}

/// Noise removal, tracking whether an advert phrase was removed (used for
/// rejection attribution when nothing else remains).
fn strip_noise_tracked(sentence: &str, cfg: &CleanerConfig) -> (String, bool) {
    let mut text = sentence.to_string();
    let mut advert_hit = false;

    // Replacement fixes loop until stable: a replacement can expose another
    // occurrence (e.g. collapsing a run of doubled halanta marks), and the
    // fixpoint guarantee of the whole pipeline depends on none remaining.
    // The iteration cap guards against pathological user configs.
    for _ in 0..1000 {
        let mut changed = false;
        for (find, replace) in &cfg.typo_fixes {
            if text.contains(find.as_str()) {
                text = text.replace(find.as_str(), replace);
                changed = true;
            }
        }
        for phrase in &cfg.advert_phrases {
            if !phrase.is_empty() && text.contains(phrase.as_str()) {
                text = text.replace(phrase.as_str(), "");
                advert_hit = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Digits of both scripts. Runs before ellipsis removal so digit removal
    // cannot join dots into a run that would then survive.
    text.retain(|c| !c.is_ascii_digit() && !is_devanagari_digit(c));

    // Ellipses: ASCII runs of 3+ dots and the single-codepoint form.
    text = ellipsis_re().replace_all(&text, "").into_owned();
    text.retain(|c| c != '…');

    // Outer quotes and leading junk, looped because stripping one layer can
    // expose the next (e.g. a dash inside outer quotes).
    loop {
        let before = text.len();
        let trimmed = text
            .trim()
            .trim_start_matches(|c| OUTER_QUOTES.contains(&c) || LEADING_JUNK.contains(&c))
            .trim_end_matches(|c| OUTER_QUOTES.contains(&c));
        if trimmed.len() == before {
            break;
        }
        text = trimmed.to_string();
    }

    // Whitespace runs collapse to single spaces.
    text = space_re().replace_all(text.trim(), " ").into_owned();

    // Spaces and commas immediately before a danda.
    text = before_danda_re().replace_all(&text, "।").into_owned();

    (text, advert_hit)
}

/// Removes digits, advert phrases, ellipses, outer quotation marks, and
/// leading marker characters; applies the configured typo fixes; collapses
/// whitespace; and strips spaces/commas immediately before a danda. Never
/// lengthens the text under the default configuration.
pub fn strip_noise(sentence: &str, cfg: &CleanerConfig) -> String {
    strip_noise_tracked(sentence, cfg).0
}

/// True iff the final word token ends with one of the verb suffixes or
/// equals one of the auxiliary verbs.
pub fn ends_with_verb(sentence: &str, patterns: &VerbPatterns) -> bool {
    let Some(token) = segment::tokenize_words(sentence).into_iter().last() else {
        return false;
    };
    patterns.auxiliaries.iter().any(|aux| token == aux)
        || patterns.suffixes.iter().any(|sfx| token.ends_with(sfx.as_str()))
}

/// Ensures the sentence ends with a terminator: trailing non-letter junk is
/// dropped, and a danda is appended when the sentence ends in a letter.
fn normalize_terminal(mut text: String, cfg: &CleanerConfig) -> String {
    loop {
        text.truncate(text.trim_end().len());
        match text.chars().last() {
            None => return text,
            Some(c) if cfg.terminators.contains(&c) => return text,
            Some(c) if is_letter_like(c) => {
                text.push('।');
                return text;
            }
            Some(c) => {
                text.truncate(text.len() - c.len_utf8());
            }
        }
    }
}

fn count_special_chars(text: &str, cfg: &CleanerConfig) -> usize {
    text.chars()
        .filter(|&c| !c.is_whitespace() && !cfg.terminators.contains(&c) && !is_letter_like(c))
        .count()
}

/// The full cleaning pipeline. Applies, in order: foreign-script rejection,
/// location-prefix stripping (to a fixpoint), noise removal, the
/// special-character budget, terminal normalization, emptiness attribution,
/// and the verb-final filter.
pub fn clean_pipeline(sentence: &str, cfg: &CleanerConfig) -> CleanOutcome {
    if contains_foreign_script(sentence) {
        return CleanOutcome::Rejected(Rejection::ForeignScript);
    }

    let mut text = sentence.to_string();
    loop {
        let stripped = strip_location_prefix(&text, cfg);
        if stripped == text {
            break;
        }
        text = stripped;
    }

    let (stripped, advert_hit) = strip_noise_tracked(&text, cfg);
    text = stripped;

    if count_special_chars(&text, cfg) > cfg.max_special_chars {
        return CleanOutcome::Rejected(Rejection::TooManySpecials);
    }

    text = normalize_terminal(text, cfg);

    if segment::word_count(&text) == 0 {
        return CleanOutcome::Rejected(if advert_hit {
            Rejection::AdvertPhrase
        } else {
            Rejection::EmptyAfterClean
        });
    }

    if !ends_with_verb(&text, &cfg.verb) {
        return CleanOutcome::Rejected(Rejection::NoVerbEnding);
    }

    CleanOutcome::Cleaned(text)
}
