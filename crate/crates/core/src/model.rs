//! Shared domain types and the record-level validation rules every pipeline
//! stage depends on.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::report::DistributionTable;
use crate::segment;

/// A scraped document with body text plus source metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    pub source_domain: String,
    pub url: String,
    pub title: String,
    pub body: String,
    #[serde(default)]
    pub raw_category: Option<String>,
    #[serde(default)]
    pub published_date: Option<String>,
    #[serde(default)]
    pub author: Option<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
}

/// The five canonical content categories. The set is closed: raw categories
/// that map to none of these exclude the sentence rather than creating an
/// "other" bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Agriculture,
    Health,
    EducationTechnology,
    CultureTourismSociety,
    GeneralCommunication,
}

impl Category {
    /// All categories in canonical (ordinal) order.
    pub const ALL: [Category; 5] = [
        Category::Agriculture,
        Category::Health,
        Category::EducationTechnology,
        Category::CultureTourismSociety,
        Category::GeneralCommunication,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Agriculture => "Agriculture",
            Category::Health => "Health",
            Category::EducationTechnology => "EducationTechnology",
            Category::CultureTourismSociety => "CultureTourismSociety",
            Category::GeneralCommunication => "GeneralCommunication",
        }
    }

    pub fn parse(s: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Word-count bucket. Buckets are inclusive, non-overlapping, and exhaustive:
/// every count maps to exactly one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LengthClass {
    /// Fewer than 3 words; retained only when explicitly configured.
    BelowMin,
    /// 3–7 words.
    Short,
    /// 8–15 words.
    Medium,
    /// 16–21 words.
    Long,
    /// 22–39 words.
    VeryLong,
    /// 40 words or more; always excluded from sampling.
    OutOfRange,
}

impl LengthClass {
    /// All classes in ordinal order.
    pub const ALL: [LengthClass; 6] = [
        LengthClass::BelowMin,
        LengthClass::Short,
        LengthClass::Medium,
        LengthClass::Long,
        LengthClass::VeryLong,
        LengthClass::OutOfRange,
    ];

    /// The unique bucket for a word count.
    pub fn from_word_count(words: usize) -> LengthClass {
        match words {
            0..=2 => LengthClass::BelowMin,
            3..=7 => LengthClass::Short,
            8..=15 => LengthClass::Medium,
            16..=21 => LengthClass::Long,
            22..=39 => LengthClass::VeryLong,
            _ => LengthClass::OutOfRange,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LengthClass::BelowMin => "BelowMin",
            LengthClass::Short => "Short",
            LengthClass::Medium => "Medium",
            LengthClass::Long => "Long",
            LengthClass::VeryLong => "VeryLong",
            LengthClass::OutOfRange => "OutOfRange",
        }
    }

    pub fn parse(s: &str) -> Option<LengthClass> {
        LengthClass::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for LengthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tense of a sentence's final verb. Total: classification never fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tense {
    NonPast,
    Past,
    Unknown,
}

impl Tense {
    pub const ALL: [Tense; 3] = [Tense::NonPast, Tense::Past, Tense::Unknown];

    pub fn as_str(self) -> &'static str {
        match self {
            Tense::NonPast => "NonPast",
            Tense::Past => "Past",
            Tense::Unknown => "Unknown",
        }
    }

    pub fn parse(s: &str) -> Option<Tense> {
        Tense::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Tense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Polarity of a sentence's final verb. Total: classification never fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Affirmative,
    Negative,
    Unknown,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Affirmative, Polarity::Negative, Polarity::Unknown];

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Affirmative => "Affirmative",
            Polarity::Negative => "Negative",
            Polarity::Unknown => "Unknown",
        }
    }

    pub fn parse(s: &str) -> Option<Polarity> {
        Polarity::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Bucketed maximum similarity of a kept sentence to the other kept sentences
/// of its category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SimilarityBand {
    Low,
    Medium,
    High,
    Unassigned,
}

impl SimilarityBand {
    pub const ALL: [SimilarityBand; 4] = [
        SimilarityBand::Low,
        SimilarityBand::Medium,
        SimilarityBand::High,
        SimilarityBand::Unassigned,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SimilarityBand::Low => "Low",
            SimilarityBand::Medium => "Medium",
            SimilarityBand::High => "High",
            SimilarityBand::Unassigned => "Unassigned",
        }
    }

    pub fn parse(s: &str) -> Option<SimilarityBand> {
        SimilarityBand::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for SimilarityBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Provenance of a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Origin {
    /// Extracted from the article dump by this pipeline.
    Scraped,
    /// Imported from an existing parallel corpus; exempt from semantic
    /// filtering and sampling quotas.
    Borrowed,
    /// Machine-generated translation pair ingested for reporting.
    Synthetic,
}

impl Origin {
    pub const ALL: [Origin; 3] = [Origin::Scraped, Origin::Borrowed, Origin::Synthetic];

    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Scraped => "Scraped",
            Origin::Borrowed => "Borrowed",
            Origin::Synthetic => "Synthetic",
        }
    }

    pub fn parse(s: &str) -> Option<Origin> {
        Origin::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Train/test membership of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Split {
    Train,
    Test,
    Unassigned,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Test, Split::Unassigned];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "Train",
            Split::Test => "Test",
            Split::Unassigned => "Unassigned",
        }
    }

    pub fn parse(s: &str) -> Option<Split> {
        Split::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One cleaned sentence with its classification and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub id: String,
    /// Cleaned text; ends with a sentence terminator and is a fixpoint of the
    /// cleaning pipeline.
    pub text: String,
    pub category: Category,
    pub word_count: usize,
    pub length_class: LengthClass,
    pub tense: Tense,
    pub polarity: Polarity,
    pub similarity_band: SimilarityBand,
    pub source_article_id: Option<String>,
    pub origin: Origin,
}

/// A source sentence aligned with its translation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelPair {
    pub id: String,
    pub nepali: AnnotatedSentence,
    /// Translation text; empty only while `split` is `Unassigned`.
    pub tamang: String,
    pub split: Split,
}

///// The final corpus: ordered pairs plus the distribution statistics computed
/// over them. `stats` must stay recomputable from `pairs`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusManifest {
    pub pairs: Vec<ParallelPair>,
    pub stats: DistributionTable,
    pub seed: u64,
    pub pipeline_config_hash: String,
}

/// A single invariant violation found by [`validate_record`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyPairId,
    EmptySentenceId,
    EmptyText,
    /// Text does not end with a sentence terminator.
    MissingTerminator,
    /// Stored word count differs from re-tokenizing the text.
    WordCountMismatch { stored: usize, derived: usize },
    /// Stored length class differs from re-deriving it from the word count.
    LengthClassMismatch {
        stored: LengthClass,
        derived: LengthClass,
    },
    /// Pair is in a split but has no translation text.
    EmptyTranslation,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyPairId => write!(f, "empty pair id"),
            Violation::EmptySentenceId => write!(f, "empty sentence id"),
            Violation::EmptyText => write!(f, "empty sentence text"),
            Violation::MissingTerminator => write!(f, "text does not end with a terminator"),
            Violation::WordCountMismatch { stored, derived } => {
                write!(f, "word_count {stored} but text tokenizes to {derived}")
            }
            Violation::LengthClassMismatch { stored, derived } => {
                write!(f, "length_class {stored} but word count derives {derived}")
            }
            Violation::EmptyTranslation => write!(f, "empty translation in an assigned split"),
        }
    }
}

/// Checks every record invariant and returns all violations, not just the
/// first. An empty result means the pair is valid.
pub fn validate_record(pair: &ParallelPair) -> Vec<Violation> {
    let mut violations = Vec::new();
    if pair.id.trim().is_empty() {
        violations.push(Violation::EmptyPairId);
    }
    let s = &pair.nepali;
    if s.id.trim().is_empty() {
        violations.push(Violation::EmptySentenceId);
    }
    if s.text.trim().is_empty() {
        violations.push(Violation::EmptyText);
    } else if !segment::ends_with_terminator(&s.text) {
        violations.push(Violation::MissingTerminator);
    }
    let derived_count = segment::word_count(&s.text);
    if derived_count != s.word_count {
        violations.push(Violation::WordCountMismatch {
            stored: s.word_count,
            derived: derived_count,
        });
    }
    let derived_class = LengthClass::from_word_count(s.word_count);
    if derived_class != s.length_class {
        violations.push(Violation::LengthClassMismatch {
            stored: s.length_class,
            derived: derived_class,
        });
    }
    if pair.split != Split::Unassigned && pair.tamang.trim().is_empty() {
        violations.push(Violation::EmptyTranslation);
    }
    violations
}
