//! Verb pattern tables: the suffix, auxiliary, and prefix sets that drive
//! tense/polarity classification and the cleaner's verb-final filter.
//!
//! Tables load from a TOML file (see `data/patterns.toml` for the built-in
//! defaults) and are validated once: entries must be non-empty Devanagari,
//! unique within their list, and disjoint across the two suffix sets of one
//! classifier — that disjointness is what makes longest-suffix matching
//! unambiguous.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;

use serde::Deserialize;
use thiserror::Error;

/// Built-in pattern table data, embedded so the library works with no data
/// files on disk.
const BUILTIN_PATTERNS: &str = include_str!("../data/patterns.toml");

/// Errors raised while loading or validating a pattern table.
#[derive(Debug, Error)]
pub enum PatternError {
    #[error("failed to read pattern file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse pattern file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("pattern list {list} is empty")]
    EmptyList { list: &'static str },
    #[error("pattern list {list} contains an empty entry")]
    EmptyEntry { list: &'static str },
    #[error("pattern entry {entry:?} in {list} contains non-Devanagari characters")]
    NonDevanagari { list: &'static str, entry: String },
    #[error("pattern entry {entry:?} appears twice in {list}")]
    DuplicateEntry { list: &'static str, entry: String },
    #[error("pattern entry {entry:?} appears in both {first} and {second}; the sets of one classifier must be disjoint")]
    DuplicateAcrossSets {
        entry: String,
        first: &'static str,
        second: &'static str,
    },
}

#[derive(Debug, Deserialize)]
struct PatternsFile {
    negative_prefix: String,
    tense: TenseSection,
    polarity: PolaritySection,
}

#[derive(Debug, Deserialize)]
struct TenseSection {
    nonpast: Vec<String>,
    past: Vec<String>,
    auxiliaries: AuxiliarySection,
}

#[derive(Debug, Deserialize)]
struct AuxiliarySection {
    past: Vec<String>,
    nonpast: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct PolaritySection {
    affirmative: Vec<String>,
    negative: Vec<String>,
    #[serde(default)]
    negative_inflections: Vec<String>,
}

/// Immutable, validated pattern tables. Construct via [`PatternTable::builtin`],
/// [`PatternTable::from_toml_str`], or [`PatternTable::from_path`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternTable {
    nonpast_suffixes: Vec<String>,
    past_suffixes: Vec<String>,
    affirmative_suffixes: Vec<String>,
    /// Bare negative endings plus whole negative inflection forms; matched
    /// identically (longest suffix wins).
    negative_suffixes: Vec<String>,
    past_auxiliaries: Vec<String>,
    nonpast_auxiliaries: Vec<String>,
    negative_prefix: String,
}

/// True for code points in the Devanagari block.
fn is_devanagari(c: char) -> bool {
    ('\u{0900}'..='\u{097F}').contains(&c)
}

/// Strips zero-width joiner artifacts that sometimes ride along in
/// Devanagari source material.
fn strip_joiners(s: &str) -> String {
    s.chars().filter(|c| !matches!(c, '\u{200C}' | '\u{200D}')).collect()
}

fn clean_list(raw: &[String], list: &'static str) -> Result<Vec<String>, PatternError> {
    if raw.is_empty() {
        return Err(PatternError::EmptyList { list });
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for entry in raw {
        let cleaned = strip_joiners(entry);
        if cleaned.is_empty() {
            return Err(PatternError::EmptyEntry { list });
        }
        if !cleaned.chars().all(is_devanagari) {
            return Err(PatternError::NonDevanagari {
                list,
                entry: entry.clone(),
            });
        }
        if !seen.insert(cleaned.clone()) {
            return Err(PatternError::DuplicateEntry {
                list,
                entry: cleaned,
            });
        }
        out.push(cleaned);
    }
    Ok(out)
}

fn check_disjoint(
    a: &[String],
    a_name: &'static str,
    b: &[String],
    b_name: &'static str,
) -> Result<(), PatternError> {
    let set: BTreeSet<&String> = a.iter().collect();
    if let Some(entry) = b.iter().find(|e| set.contains(e)) {
        return Err(PatternError::DuplicateAcrossSets {
            entry: entry.clone(),
            first: a_name,
            second: b_name,
        });
    }
    Ok(())
}

impl PatternTable {
    /// The embedded default tables. Parsed once; the data file is covered by
    /// tests, so failure here is a build defect.
    pub fn builtin() -> &'static PatternTable {
        static TABLE: OnceLock<PatternTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            PatternTable::from_toml_str(BUILTIN_PATTERNS)
                .expect("embedded pattern table must be valid")
        })
    }

    /// Parses and validates a pattern table from TOML text.
    pub fn from_toml_str(text: &str) -> Result<PatternTable, PatternError> {
        let file: PatternsFile = toml::from_str(text)?;
        let nonpast = clean_list(&file.tense.nonpast, "tense.nonpast")?;
        let past = clean_list(&file.tense.past, "tense.past")?;
        let affirmative = clean_list(&file.polarity.affirmative, "polarity.affirmative")?;
        let mut negative = clean_list(&file.polarity.negative, "polarity.negative")?;
        if !file.polarity.negative_inflections.is_empty() {
            let inflections =
                clean_list(&file.polarity.negative_inflections, "polarity.negative_inflections")?;
            for entry in inflections {
                if negative.contains(&entry) {
                    return Err(PatternError::DuplicateEntry {
                        list: "polarity.negative_inflections",
                        entry,
                    });
                }
                negative.push(entry);
            }
        }
        let past_aux = clean_list(&file.tense.auxiliaries.past, "tense.auxiliaries.past")?;
        let nonpast_aux =
            clean_list(&file.tense.auxiliaries.nonpast, "tense.auxiliaries.nonpast")?;

        check_disjoint(&nonpast, "tense.nonpast", &past, "tense.past")?;
        check_disjoint(
            &affirmative,
            "polarity.affirmative",
            &negative,
            "polarity.negative",
        )?;
        check_disjoint(
            &past_aux,
            "tense.auxiliaries.past",
            &nonpast_aux,
            "tense.auxiliaries.nonpast",
        )?;

        let prefix = strip_joiners(&file.negative_prefix);
        if prefix.is_empty() {
            return Err(PatternError::EmptyEntry {
                list: "negative_prefix",
            });
        }
        if !prefix.chars().all(is_devanagari) {
            return Err(PatternError::NonDevanagari {
                list: "negative_prefix",
                entry: file.negative_prefix.clone(),
            });
        }

        Ok(PatternTable {
            nonpast_suffixes: nonpast,
            past_suffixes: past,
            affirmative_suffixes: affirmative,
            negative_suffixes: negative,
            past_auxiliaries: past_aux,
            nonpast_auxiliaries: nonpast_aux,
            negative_prefix: prefix,
        })
    }

    /// Loads and validates a pattern table from a TOML file.
    pub fn from_path(path: &Path) -> Result<PatternTable, PatternError> {
        let text = std::fs::read_to_string(path).map_err(|source| PatternError::Io {
            path: path.display().to_string(),
            source,
        })?;
        PatternTable::from_toml_str(&text)
    }

    pub fn nonpast_suffixes(&self) -> &[String] {
        &self.nonpast_suffixes
    }

    pub fn past_suffixes(&self) -> &[String] {
        &self.past_suffixes
    }

    pub fn affirmative_suffixes(&self) -> &[String] {
        &self.affirmative_suffixes
    }

    /// Bare negative endings plus negative inflection forms.
    pub fn negative_suffixes(&self) -> &[String] {
        &self.negative_suffixes
    }

    pub fn past_auxiliaries(&self) -> &[String] {
        &self.past_auxiliaries
    }

    pub fn nonpast_auxiliaries(&self) -> &[String] {
        &self.nonpast_auxiliaries
    }

    pub fn negative_prefix(&self) -> &str {
        &self.negative_prefix
    }

    /// Every tense suffix (both sets) plus the negative inflection forms —
    /// the suffix set the cleaner's verb-final filter matches against.
    pub fn verb_final_suffixes(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .nonpast_suffixes
            .iter()
            .chain(self.past_suffixes.iter())
            .cloned()
            .collect();
        for entry in &self.negative_suffixes {
            if !out.contains(entry) {
                out.push(entry.clone());
            }
        }
        out
    }

    /// Every auxiliary verb (matched by whole-token equality).
    pub fn auxiliaries(&self) -> Vec<String> {
        let mut out = self.past_auxiliaries.clone();
        for aux in &self.nonpast_auxiliaries {
            if !out.contains(aux) {
                out.push(aux.clone());
            }
        }
        out
    }
}
