//! Article-dump parsing and category assignment.
//!
//! The input is one JSON article per line. Parsing is forgiving about bad
//! lines — each is counted and logged, never fatal — and strict about
//! duplicates: the first article wins for both repeated ids and repeated
//! normalized URLs. All Devanagari-bearing fields are NFC-normalized on
//! entry so every later stage can compare text byte-wise.
//!
//! Category assignment is a two-step funnel. A [`CategoryFunnel`] extracts
//! a raw category string from the first matching layer (explicit category
//! field, URL path segment, title, keywords); a [`KeywordMap`] then
//! regularizes that raw string onto the closed category set. Articles whose
//! raw category regularizes to nothing stay uncategorized and are excluded
//! downstream, keeping the category set closed.

use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;
use std::sync::OnceLock;

use regex::{Regex, RegexBuilder};
use serde::Deserialize;
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::model::{Article, Category};

/// Errors from loading rule files.
#[derive(Debug, Error)]
pub enum IngestError {
    /// A rule file could not be read.
    #[error("failed to read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// A rule file is not valid TOML.
    #[error("invalid rule file")]
    Parse(#[from] toml::de::Error),
    /// A rule pattern is not a valid regular expression.
    #[error("invalid pattern {pattern:?}")]
    InvalidRegex {
        pattern: String,
        #[source]
        source: Box<regex::Error>,
    },
    /// A keyword-map target is not one of the canonical categories.
    #[error("unknown category target {target:?}")]
    UnknownCategory { target: String },
    /// A funnel layer is malformed.
    #[error("invalid layer {index}: {reason}")]
    InvalidLayer { index: usize, reason: String },
}

/// What a parse pass saw, plus the surviving articles in input order.
#[derive(Debug, Default)]
pub struct ParseReport {
    pub articles: Vec<Article>,
    /// Every line read, including blank and malformed ones.
    pub lines_read: usize,
    /// Lines that were empty or whitespace-only.
    pub blank_lines: usize,
    /// Lines that were not valid article JSON.
    pub malformed: usize,
    /// Articles whose body was empty after normalization.
    pub empty_body: usize,
    /// Articles dropped because their id was already seen.
    pub duplicate_id: usize,
    /// Articles dropped because their normalized URL was already seen.
    pub duplicate_url: usize,
}

fn nfc(s: &str) -> String {
    s.nfc().collect()
}

/// Canonicalizes a URL for duplicate detection: lowercases the scheme and
/// host, drops the fragment, and leaves path and query untouched.
pub fn normalize_url(url: &str) -> String {
    let no_fragment = url.trim().split('#').next().unwrap_or("");
    match no_fragment.split_once("://") {
        Some((scheme, rest)) => {
            let (host, tail) = match rest.find(['/', '?']) {
                Some(i) => rest.split_at(i),
                None => (rest, ""),
            };
            format!(
                "{}://{}{}",
                scheme.to_ascii_lowercase(),
                host.to_ascii_lowercase(),
                tail
            )
        }
        None => no_fragment.to_string(),
    }
}

/// Parses a line-delimited JSON article stream.
///
/// Malformed lines and empty bodies are counted and skipped with a warning;
/// repeated ids and repeated normalized URLs keep the first occurrence.
/// Only transport errors (failing to read the stream itself) are fatal.
pub fn parse_article_stream<R: BufRead>(reader: R) -> std::io::Result<ParseReport> {
    let mut report = ParseReport::default();
    let mut seen_ids: HashSet<String> = HashSet::new();
    let mut seen_urls: HashSet<String> = HashSet::new();
    for line in reader.lines() {
        let line = line?;
        report.lines_read += 1;
        if line.trim().is_empty() {
            report.blank_lines += 1;
            continue;
        }
        let mut article: Article = match serde_json::from_str(&line) {
            Ok(article) => article,
            Err(e) => {
                log::warn!("skipping malformed article line {}: {e}", report.lines_read);
                report.malformed += 1;
                continue;
            }
        };
        article.title = nfc(&article.title);
        article.body = nfc(&article.body);
        article.raw_category = article.raw_category.as_deref().map(nfc);
        article.keywords = article.keywords.iter().map(|k| nfc(k)).collect();
        if article.body.trim().is_empty() {
            report.empty_body += 1;
            continue;
        }
        if !seen_ids.insert(article.id.clone()) {
            report.duplicate_id += 1;
            continue;
        }
        let url_key = normalize_url(&article.url);
        if !url_key.is_empty() && !seen_urls.insert(url_key) {
            report.duplicate_url += 1;
            continue;
        }
        report.articles.push(article);
    }
    Ok(report)
}

/// Which article field a funnel layer inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerField {
    RawCategory,
    Url,
    Title,
    Keywords,
}

impl LayerField {
    fn parse(s: &str) -> Option<LayerField> {
        match s {
            "raw_category" => Some(LayerField::RawCategory),
            "url" => Some(LayerField::Url),
            "title" => Some(LayerField::Title),
            "keywords" => Some(LayerField::Keywords),
            _ => None,
        }
    }
}

/// What a matching layer yields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerTarget {
    /// The pattern's first capture group (whole match when groupless).
    Capture,
    /// A fixed raw-category string.
    Fixed(String),
}

/// One prioritized extraction rule.
#[derive(Debug, Clone)]
pub struct Layer {
    pub index: usize,
    pub field: LayerField,
    pub pattern: Regex,
    pub target: LayerTarget,
}

#[derive(Deserialize)]
struct LayersFile {
    #[serde(rename = "layer", default)]
    layers: Vec<LayerEntry>,
}

#[derive(Deserialize)]
struct LayerEntry {
    index: usize,
    field: String,
    pattern: String,
    target: String,
    #[serde(default)]
    value: Option<String>,
}

/// Ordered extraction rules producing a raw category string per article.
#[derive(Debug, Clone)]
pub struct CategoryFunnel {
    layers: Vec<Layer>,
}

impl CategoryFunnel {
    /// The compiled-in default funnel.
    pub fn builtin() -> &'static CategoryFunnel {
        static FUNNEL: OnceLock<CategoryFunnel> = OnceLock::new();
        FUNNEL.get_or_init(|| {
            CategoryFunnel::from_toml_str(include_str!("../data/layers.toml"))
                .expect("built-in layer rules are valid")
        })
    }

    /// Parses funnel layers from TOML text.
    pub fn from_toml_str(text: &str) -> Result<CategoryFunnel, IngestError> {
        let file: LayersFile = toml::from_str(text)?;
        let mut layers = Vec::with_capacity(file.layers.len());
        for entry in file.layers {
            let field = LayerField::parse(&entry.field).ok_or_else(|| IngestError::InvalidLayer {
                index: entry.index,
                reason: format!("unknown field {:?}", entry.field),
            })?;
            let target = match entry.target.as_str() {
                "capture" => LayerTarget::Capture,
                "fixed" => LayerTarget::Fixed(entry.value.clone().ok_or_else(|| {
                    IngestError::InvalidLayer {
                        index: entry.index,
                        reason: "target \"fixed\" requires a value".to_string(),
                    }
                })?),
                other => {
                    return Err(IngestError::InvalidLayer {
                        index: entry.index,
                        reason: format!("unknown target {other:?}"),
                    });
                }
            };
            let pattern = Regex::new(&entry.pattern).map_err(|source| IngestError::InvalidRegex {
                pattern: entry.pattern.clone(),
                source: Box::new(source),
            })?;
            layers.push(Layer {
                index: entry.index,
                field,
                pattern,
                target,
            });
        }
        layers.sort_by_key(|l| l.index);
        Ok(CategoryFunnel { layers })
    }

    /// Loads funnel layers from a TOML file.
    pub fn from_path(path: &Path) -> Result<CategoryFunnel, IngestError> {
        let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        CategoryFunnel::from_toml_str(&text)
    }

    /// The raw category string from the first matching layer, if any.
    ///
    /// URL layers match against the normalized URL; keyword layers try each
    /// keyword in order.
    pub fn extract(&self, article: &Article) -> Option<String> {
        for layer in &self.layers {
            let candidates: Vec<String> = match layer.field {
                LayerField::RawCategory => article.raw_category.iter().cloned().collect(),
                LayerField::Url => vec![normalize_url(&article.url)],
                LayerField::Title => vec![article.title.clone()],
                LayerField::Keywords => article.keywords.clone(),
            };
            for value in candidates.iter().filter(|v| !v.is_empty()) {
                if let Some(caps) = layer.pattern.captures(value) {
                    return Some(match &layer.target {
                        LayerTarget::Capture => caps
                            .get(1)
                            .or_else(|| caps.get(0))
                            .map(|m| m.as_str().to_string())
                            .unwrap_or_default(),
                        LayerTarget::Fixed(v) => v.clone(),
                    });
                }
            }
        }
        None
    }
}

#[derive(Deserialize)]
struct KeywordsFile {
    #[serde(rename = "entry", default)]
    entries: Vec<KeywordEntry>,
}

#[derive(Deserialize)]
struct KeywordEntry {
    pattern: String,
    target: String,
}

/// Ordered case-insensitive patterns mapping raw category strings onto the
/// closed category set.
#[derive(Debug, Clone)]
pub struct KeywordMap {
    entries: Vec<(Regex, Category)>,
}

impl KeywordMap {
    /// The compiled-in default keyword map.
    pub fn builtin() -> &'static KeywordMap {
        static MAP: OnceLock<KeywordMap> = OnceLock::new();
        MAP.get_or_init(|| {
            KeywordMap::from_toml_str(include_str!("../data/keywords.toml"))
                .expect("built-in keyword map is valid")
        })
    }

    /// Parses a keyword map from TOML text.
    pub fn from_toml_str(text: &str) -> Result<KeywordMap, IngestError> {
        let file: KeywordsFile = toml::from_str(text)?;
        let mut entries = Vec::with_capacity(file.entries.len());
        for entry in file.entries {
            let category = Category::parse(&entry.target).ok_or(IngestError::UnknownCategory {
                target: entry.target.clone(),
            })?;
            let regex = RegexBuilder::new(&entry.pattern)
                .case_insensitive(true)
                .build()
                .map_err(|source| IngestError::InvalidRegex {
                    pattern: entry.pattern.clone(),
                    source: Box::new(source),
                })?;
            entries.push((regex, category));
        }
        Ok(KeywordMap { entries })
    }

    /// Loads a keyword map from a TOML file.
    pub fn from_path(path: &Path) -> Result<KeywordMap, IngestError> {
        let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        KeywordMap::from_toml_str(&text)
    }

    /// The canonical category for a raw category string, if any entry
    /// matches it.
    pub fn regularize(&self, raw: &str) -> Option<Category> {
        self.entries
            .iter()
            .find(|(regex, _)| regex.is_match(raw))
            .map(|&(_, category)| category)
    }
}

/// The funnel and keyword map composed: extract a raw category, then
/// regularize it. `None` means the article stays uncategorized.
pub fn categorize(
    article: &Article,
    funnel: &CategoryFunnel,
    map: &KeywordMap,
) -> Option<Category> {
    funnel.extract(article).and_then(|raw| map.regularize(&raw))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn article_json(id: &str, url: &str, body: &str) -> String {
        serde_json::json!({
            "id": id,
            "source_domain": "example.np",
            "url": url,
            "title": "शीर्षक",
            "body": body,
        })
        .to_string()
    }

    #[test]
    fn parse_skips_and_counts_bad_lines() {
        let input = format!(
            "{}\n\n{}\nnot json at all\n{}\n{}\n{}\n",
            article_json("a1", "https://example.np/krishi/1", "वाक्य एक।"),
            article_json("a2", "https://example.np/krishi/2", "   "),
            article_json("a1", "https://example.np/krishi/3", "वाक्य दुई।"),
            article_json("a3", "HTTPS://EXAMPLE.np/krishi/1#frag", "वाक्य तीन।"),
            article_json("a4", "https://example.np/krishi/4", "वाक्य चार।"),
        );
        let report = parse_article_stream(input.as_bytes()).unwrap();
        assert_eq!(report.lines_read, 7);
        assert_eq!(report.blank_lines, 1);
        assert_eq!(report.malformed, 1);
        assert_eq!(report.empty_body, 1);
        assert_eq!(report.duplicate_id, 1);
        assert_eq!(report.duplicate_url, 1);
        let ids: Vec<&str> = report.articles.iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, vec!["a1", "a4"]);
    }

    #[test]
    fn parse_normalizes_text_fields_to_nfc() {
        // "क़" as base + nukta (U+0915 U+093C) is already NFC; the
        // precomposed form (U+0958) must decompose to it.
        let line = article_json("a1", "https://example.np/x/1", "\u{0958}िला।");
        let report = parse_article_stream(line.as_bytes()).unwrap();
        assert_eq!(report.articles[0].body, "\u{0915}\u{093C}िला।");
    }

    #[test]
    fn url_normalization_cases() {
        assert_eq!(
            normalize_url("HTTPS://Example.NP/Krishi/1#section"),
            "https://example.np/Krishi/1"
        );
        assert_eq!(normalize_url("https://a.np"), "https://a.np");
        assert_eq!(
            normalize_url("https://a.np?q=1#f"),
            "https://a.np?q=1"
        );
        assert_eq!(normalize_url("  plain-text#frag  "), "plain-text");
        assert_eq!(normalize_url(""), "");
    }

    fn article_with(
        raw_category: Option<&str>,
        url: &str,
        title: &str,
        keywords: &[&str],
    ) -> Article {
        Article {
            id: "a1".to_string(),
            source_domain: "example.np".to_string(),
            url: url.to_string(),
            title: title.to_string(),
            body: "पाठ।".to_string(),
            raw_category: raw_category.map(str::to_string),
            published_date: None,
            author: None,
            keywords: keywords.iter().map(|k| k.to_string()).collect(),
        }
    }

    #[test]
    fn funnel_prefers_earlier_layers() {
        let funnel = CategoryFunnel::builtin();
        // Explicit raw category wins over everything.
        let a = article_with(Some("कृषि समाचार"), "https://x.np/health/1", "शिक्षा", &[]);
        assert_eq!(funnel.extract(&a).as_deref(), Some("कृषि समाचार"));
        // Next: first URL path segment.
        let a = article_with(None, "https://x.np/health/2", "समाचार", &[]);
        assert_eq!(funnel.extract(&a).as_deref(), Some("health"));
        // Then title, then keywords.
        let a = article_with(None, "", "आजको स्वास्थ्य टिप्स", &[]);
        assert_eq!(funnel.extract(&a).as_deref(), Some("स्वास्थ्य"));
        let a = article_with(None, "", "शीर्षक", &["यात्रा", "पर्यटन"]);
        assert_eq!(funnel.extract(&a).as_deref(), Some("पर्यटन"));
        let a = article_with(None, "", "शीर्षक", &[]);
        assert_eq!(funnel.extract(&a), None);
    }

    #[test]
    fn keyword_map_is_case_insensitive_and_ordered() {
        let map = KeywordMap::builtin();
        assert_eq!(map.regularize("कृषि समाचार"), Some(Category::Agriculture));
        assert_eq!(map.regularize("AGRI-news"), Some(Category::Agriculture));
        assert_eq!(map.regularize("health"), Some(Category::Health));
        assert_eq!(map.regularize("प्रविधि"), Some(Category::EducationTechnology));
        assert_eq!(map.regularize("पर्यटन"), Some(Category::CultureTourismSociety));
        assert_eq!(map.regularize("समाचार"), Some(Category::GeneralCommunication));
        assert_eq!(map.regularize("sports"), None);
    }

    #[test]
    fn categorize_composes_extraction_and_regularization() {
        let funnel = CategoryFunnel::builtin();
        let map = KeywordMap::builtin();
        let a = article_with(None, "https://x.np/agri/55", "शीर्षक", &[]);
        assert_eq!(categorize(&a, funnel, map), Some(Category::Agriculture));
        // A raw category that regularizes to nothing leaves the article
        // uncategorized even though a later layer would have matched.
        let a = article_with(Some("खेलकुद"), "https://x.np/agri/56", "शीर्षक", &[]);
        assert_eq!(categorize(&a, funnel, map), None);
    }

    #[test]
    fn rule_files_validate_their_targets() {
        let bad = "[[entry]]\npattern = \"x\"\ntarget = \"Sports\"\n";
        assert!(matches!(
            KeywordMap::from_toml_str(bad),
            Err(IngestError::UnknownCategory { .. })
        ));
        let bad = "[[layer]]\nindex = 0\nfield = \"nope\"\npattern = \"x\"\ntarget = \"capture\"\n";
        assert!(matches!(
            CategoryFunnel::from_toml_str(bad),
            Err(IngestError::InvalidLayer { .. })
        ));
        let bad = "[[layer]]\nindex = 0\nfield = \"url\"\npattern = \"(\"\ntarget = \"capture\"\n";
        assert!(matches!(
            CategoryFunnel::from_toml_str(bad),
            Err(IngestError::InvalidRegex { .. })
        ));
        let bad = "[[layer]]\nindex = 0\nfield = \"url\"\npattern = \"x\"\ntarget = \"fixed\"\n";
        assert!(matches!(
            CategoryFunnel::from_toml_str(bad),
            Err(IngestError::InvalidLayer { .. })
        ));
    }
}
