//! Exact and near-duplicate removal over sentence embeddings.
//!
//! Exact deduplication keys on NFC-normalized text and keeps the first
//! occurrence. Near-duplicate filtering embeds each sentence as a vector,
//! walks the list in order, and drops any sentence whose cosine similarity
//! to an already-kept sentence exceeds the threshold — a greedy pass, so
//! of several mutual near-duplicates exactly the earliest survives.
//!
//! Embeddings come from an [`EmbeddingProvider`]: either the built-in
//! hashed character n-gram embedder (deterministic, no model files) or a
//! sidecar file of precomputed vectors. All vectors are unit-length; the
//! filter normalizes (or rejects) anything else at load time so cosine is
//! a plain dot product downstream.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::model::{AnnotatedSentence, SimilarityBand};

/// Errors from embedding, vector algebra, and filtering.
#[derive(Debug, Error)]
pub enum DedupError {
    /// Two vectors of different lengths were compared.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// Cosine similarity is undefined for an all-zero vector.
    #[error("zero vector for {id:?}: cosine similarity is undefined")]
    ZeroVector { id: String },
    /// The text is too short to produce any character n-grams.
    #[error("cannot embed {id:?}: text has no character n-grams")]
    NoNgrams { id: String },
    /// A sidecar vector file could not be read.
    #[error("failed to read vector file {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// A sidecar vector file line is not `id<TAB>v1,v2,...`.
    #[error("malformed vector file line {line} in {path}: {reason}")]
    MalformedVectorLine {
        path: String,
        line: usize,
        reason: String,
    },
    /// A sentence has no vector in the sidecar file.
    #[error("no embedding vector for sentence {id:?}")]
    MissingVector { id: String },
    /// The filter was handed sentences from more than one category.
    #[error("semantic filter expects a single category, got {0:?}")]
    MixedCategories(Vec<String>),
    /// An index was built over a non-unit vector.
    #[error("vector for {id:?} is not unit length (norm {norm})")]
    NotUnitLength { id: String, norm: f64 },
}

/// A source of sentence embedding vectors.
///
/// Implementations must be deterministic: the same text must always map to
/// the same vector, independent of what else has been embedded.
pub trait EmbeddingProvider: Sync {
    /// The length of every vector this provider returns.
    fn dimension(&self) -> usize;
    /// The unit-length embedding of `text`; `id` is used in error messages.
    fn embed(&self, id: &str, text: &str) -> Result<Vec<f64>, DedupError>;
}

/// 64-bit FNV-1a over a byte slice.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Deterministic embedding from hashed character n-gram counts.
///
/// Every character 2-gram and 3-gram of the text is hashed into one of
/// `dimension` buckets; the bucket counts, L2-normalized, are the vector.
/// Texts sharing most of their character sequences land close together,
/// which is exactly the near-duplicate signal the filter needs, and the
/// construction depends on nothing but the text itself.
#[derive(Debug, Clone)]
pub struct HashedNgramEmbedder {
    dimension: usize,
}

impl HashedNgramEmbedder {
    /// Bucket count used when no dimension is configured.
    pub const DEFAULT_DIMENSION: usize = 512;

    /// Creates an embedder with `dimension` hash buckets (minimum 2).
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension: dimension.max(2),
        }
    }
}

impl Default for HashedNgramEmbedder {
    fn default() -> Self {
        Self::new(Self::DEFAULT_DIMENSION)
    }
}

impl EmbeddingProvider for HashedNgramEmbedder {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, id: &str, text: &str) -> Result<Vec<f64>, DedupError> {
        let chars: Vec<char> = text.chars().collect();
        let mut counts = vec![0u32; self.dimension];
        let mut total = 0u64;
        let mut buf = String::new();
        for n in [2usize, 3] {
            if chars.len() < n {
                continue;
            }
            for window in chars.windows(n) {
                buf.clear();
                buf.extend(window.iter());
                let idx = (fnv1a(buf.as_bytes()) % self.dimension as u64) as usize;
                counts[idx] += 1;
                total += 1;
            }
        }
        if total == 0 {
            return Err(DedupError::NoNgrams { id: id.to_string() });
        }
        let norm = counts
            .iter()
            .map(|&c| f64::from(c) * f64::from(c))
            .sum::<f64>()
            .sqrt();
        Ok(counts.iter().map(|&c| f64::from(c) / norm).collect())
    }
}

/// Embeddings read from a sidecar file of precomputed vectors.
///
/// Format: an optional first line `#dim<TAB>D`, then one line per sentence,
/// `id<TAB>v1,v2,...`. Vectors are normalized to unit length on load; a
/// non-unit input is accepted with a warning, a zero vector is an error.
pub struct FileBackedProvider {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl FileBackedProvider {
    /// Loads vectors from `path`.
    pub fn from_path(path: &Path) -> Result<Self, DedupError> {
        let file = std::fs::File::open(path).map_err(|source| DedupError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_reader(std::io::BufReader::new(file), &path.display().to_string())
    }

    /// Loads vectors from any line-oriented reader; `path` labels errors.
    pub fn from_reader<R: BufRead>(reader: R, path: &str) -> Result<Self, DedupError> {
        let malformed = |line: usize, reason: &str| DedupError::MalformedVectorLine {
            path: path.to_string(),
            line,
            reason: reason.to_string(),
        };
        let mut dimension: Option<usize> = None;
        let mut vectors = HashMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| DedupError::Io {
                path: path.to_string(),
                source,
            })?;
            let lineno = idx + 1;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("#dim\t") {
                dimension = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| malformed(lineno, "unparseable dimension header"))?,
                );
                continue;
            }
            let (id, values) = line
                .split_once('\t')
                .ok_or_else(|| malformed(lineno, "missing tab between id and values"))?;
            if id.is_empty() {
                return Err(malformed(lineno, "empty id"));
            }
            let mut vector = Vec::new();
            for piece in values.split(',') {
                let v: f64 = piece
                    .trim()
                    .parse()
                    .map_err(|_| malformed(lineno, "unparseable component"))?;
                if !v.is_finite() {
                    return Err(malformed(lineno, "non-finite component"));
                }
                vector.push(v);
            }
            match dimension {
                None => dimension = Some(vector.len()),
                Some(d) if d != vector.len() => {
                    return Err(malformed(lineno, "inconsistent vector dimension"));
                }
                Some(_) => {}
            }
            let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(DedupError::ZeroVector { id: id.to_string() });
            }
            if (norm - 1.0).abs() > 1e-6 {
                log::warn!("vector for {id:?} has norm {norm}; normalizing");
            }
            let vector: Vec<f64> = vector.iter().map(|v| v / norm).collect();
            vectors.insert(id.to_string(), vector);
        }
        Ok(Self {
            dimension: dimension.unwrap_or(0),
            vectors,
        })
    }

    /// The number of vectors loaded.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// Whether the file held no vectors.
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl EmbeddingProvider for FileBackedProvider {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, id: &str, _text: &str) -> Result<Vec<f64>, DedupError> {
        self.vectors
            .get(id)
            .cloned()
            .ok_or_else(|| DedupError::MissingVector { id: id.to_string() })
    }
}

/// Cosine similarity of two vectors, clamped to [-1, 1].
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, DedupError> {
    if a.len() != b.len() {
        return Err(DedupError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 {
        return Err(DedupError::ZeroVector { id: "left".into() });
    }
    if nb == 0.0 {
        return Err(DedupError::ZeroVector { id: "right".into() });
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// One sentence dropped by the near-duplicate filter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedNearDuplicate {
    /// The sentence that was dropped.
    pub dropped_id: String,
    /// The kept sentence it was most similar to.
    pub kept_id: String,
    /// Their cosine similarity.
    pub similarity: f64,
}

/// What the near-duplicate filter did to one category's sentences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DedupReport {
    /// Sentences examined.
    pub input: usize,
    /// Sentences surviving the filter.
    pub kept: usize,
    /// Sentences dropped, each with its nearest kept neighbour.
    pub dropped: Vec<DroppedNearDuplicate>,
    /// Cosine evaluations performed.
    pub comparisons_made: usize,
    /// The similarity threshold applied (exclusive: drop when above it).
    pub threshold: f64,
}

/// Removes exact duplicates, keeping the first occurrence of each
/// NFC-normalized text. Returns the survivors and the dropped ids.
pub fn exact_dedup(sentences: Vec<AnnotatedSentence>) -> (Vec<AnnotatedSentence>, Vec<String>) {
    exact_dedup_by_key(sentences, |s| s.text.nfc().collect::<String>())
}

/// Removes duplicates under an arbitrary key, keeping first occurrences.
pub fn exact_dedup_by_key<T, K, F>(items: Vec<T>, mut key: F) -> (Vec<T>, Vec<String>)
where
    K: std::hash::Hash + Eq,
    F: FnMut(&T) -> K,
    T: HasId,
{
    let mut seen = HashSet::new();
    let mut kept = Vec::with_capacity(items.len());
    let mut dropped = Vec::new();
    for item in items {
        if seen.insert(key(&item)) {
            kept.push(item);
        } else {
            dropped.push(item.id().to_string());
        }
    }
    (kept, dropped)
}

/// Anything with a stable string id, for duplicate reporting.
pub trait HasId {
    /// The record's identifier.
    fn id(&self) -> &str;
}

impl HasId for AnnotatedSentence {
    fn id(&self) -> &str {
        &self.id
    }
}

/// Greedy near-duplicate filter over one category's sentences.
///
/// Walks `sentences` in order; each sentence is kept unless its cosine
/// similarity to some already-kept sentence strictly exceeds `threshold`,
/// in which case it is dropped and attributed to the most similar kept
/// sentence. All sentences must share one category.
pub fn semantic_filter(
    sentences: Vec<AnnotatedSentence>,
    provider: &dyn EmbeddingProvider,
    threshold: f64,
) -> Result<(Vec<AnnotatedSentence>, DedupReport), DedupError> {
    let categories: Vec<String> = sentences
        .iter()
        .map(|s| s.category.as_str().to_string())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if categories.len() > 1 {
        return Err(DedupError::MixedCategories(categories));
    }
    let input = sentences.len();
    let mut kept: Vec<AnnotatedSentence> = Vec::with_capacity(input);
    let mut kept_vectors: Vec<Vec<f64>> = Vec::with_capacity(input);
    let mut dropped = Vec::new();
    let mut comparisons_made = 0usize;
    for sentence in sentences {
        let vector = provider.embed(&sentence.id, &sentence.text)?;
        let mut best: Option<(usize, f64)> = None;
        for (i, kv) in kept_vectors.iter().enumerate() {
            let sim = cosine(&vector, kv)?;
            comparisons_made += 1;
            if best.is_none_or(|(_, b)| sim > b) {
                best = Some((i, sim));
            }
        }
        match best {
            Some((i, sim)) if sim > threshold => {
                dropped.push(DroppedNearDuplicate {
                    dropped_id: sentence.id.clone(),
                    kept_id: kept[i].id.clone(),
                    similarity: sim,
                });
            }
            _ => {
                kept.push(sentence);
                kept_vectors.push(vector);
            }
        }
    }
    let report = DedupReport {
        input,
        kept: kept.len(),
        dropped,
        comparisons_made,
        threshold,
    };
    Ok((kept, report))
}

/// An exact nearest-neighbour index over unit vectors.
///
/// Lookup is a full linear scan, so results are exact by construction —
/// `query` returns precisely the vectors whose cosine with the query
/// exceeds the cutoff, ranked by similarity.
pub struct CandidateIndex {
    dimension: usize,
    ids: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

impl CandidateIndex {
    /// Builds an index over `(id, vector)` pairs; every vector must be unit
    /// length and share one dimension.
    pub fn build(entries: Vec<(String, Vec<f64>)>) -> Result<Self, DedupError> {
        let mut index = Self {
            dimension: entries.first().map_or(0, |(_, v)| v.len()),
            ids: Vec::with_capacity(entries.len()),
            vectors: Vec::with_capacity(entries.len()),
        };
        for (id, vector) in entries {
            index.push(id, vector)?;
        }
        Ok(index)
    }

    /// Adds one unit vector to the index.
    pub fn push(&mut self, id: String, vector: Vec<f64>) -> Result<(), DedupError> {
        if self.vectors.is_empty() {
            self.dimension = vector.len();
        } else if vector.len() != self.dimension {
            return Err(DedupError::DimensionMismatch {
                left: self.dimension,
                right: vector.len(),
            });
        }
        let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(DedupError::NotUnitLength { id, norm });
        }
        self.ids.push(id);
        self.vectors.push(vector);
        Ok(())
    }

    /// The number of indexed vectors.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Whether the index is empty.
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// All entries with cosine similarity to `vector` strictly above
    /// `cutoff`, most similar first (ties broken by insertion order).
    pub fn query(&self, vector: &[f64], cutoff: f64) -> Result<Vec<(String, f64)>, DedupError> {
        let mut hits: Vec<(usize, f64)> = Vec::new();
        for (i, candidate) in self.vectors.iter().enumerate() {
            let sim = cosine(vector, candidate)?;
            if sim > cutoff {
                hits.push((i, sim));
            }
        }
        hits.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
        Ok(hits
            .into_iter()
            .map(|(i, sim)| (self.ids[i].clone(), sim))
            .collect())
    }
}

/// Band boundaries partitioning [0, threshold] into low/medium/high.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandBoundaries {
    /// Upper edge of the low band (inclusive).
    pub low_max: f64,
    /// Upper edge of the medium band (inclusive).
    pub medium_max: f64,
}

impl BandBoundaries {
    /// Equal thirds of [0, `threshold`].
    pub fn thirds_of(threshold: f64) -> Self {
        Self {
            low_max: threshold / 3.0,
            medium_max: 2.0 * threshold / 3.0,
        }
    }

    /// The band for a similarity value.
    pub fn band(&self, similarity: f64) -> SimilarityBand {
        if similarity <= self.low_max {
            SimilarityBand::Low
        } else if similarity <= self.medium_max {
            SimilarityBand::Medium
        } else {
            SimilarityBand::High
        }
    }
}

/// Assigns each surviving sentence a similarity band from its maximum
/// cosine similarity to any *other* survivor in the same category. A
/// category with a single survivor stays `Unassigned`.
pub fn assign_similarity_bands(
    sentences: &mut [AnnotatedSentence],
    provider: &dyn EmbeddingProvider,
    boundaries: BandBoundaries,
) -> Result<(), DedupError> {
    let mut by_category: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in sentences.iter().enumerate() {
        by_category.entry(s.category.as_str()).or_default().push(i);
    }
    for indices in by_category.values() {
        if indices.len() < 2 {
            continue;
        }
        let mut vectors = Vec::with_capacity(indices.len());
        for &i in indices {
            vectors.push(provider.embed(&sentences[i].id, &sentences[i].text)?);
        }
        for (a, &i) in indices.iter().enumerate() {
            let mut max_sim = f64::NEG_INFINITY;
            for (b, _) in indices.iter().enumerate() {
                if a == b {
                    continue;
                }
                let sim = cosine(&vectors[a], &vectors[b])?;
                if sim > max_sim {
                    max_sim = sim;
                }
            }
            sentences[i].similarity_band = boundaries.band(max_sim.max(0.0));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Category, Origin, Tense};
    use crate::patterns::PatternTable;

    fn sentence(id: &str, text: &str, category: Category) -> AnnotatedSentence {
        crate::annotate::annotate(id, text, category, PatternTable::builtin(), Origin::Scraped, None)
            .unwrap()
    }

    #[test]
    fn embedder_is_deterministic_and_unit_length() {
        let e = HashedNgramEmbedder::default();
        let a = e.embed("x", "आजको मौसम राम्रो छ।").unwrap();
        let b = e.embed("y", "आजको मौसम राम्रो छ।").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 512);
        let norm: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embedder_rejects_single_character_text() {
        let e = HashedNgramEmbedder::default();
        assert!(matches!(e.embed("x", "क"), Err(DedupError::NoNgrams { .. })));
    }

    #[test]
    fn similar_texts_score_higher_than_unrelated_texts() {
        let e = HashedNgramEmbedder::default();
        let a = e.embed("a", "आजको मौसम धेरै राम्रो छ।").unwrap();
        let b = e.embed("b", "आजको मौसम राम्रो छ।").unwrap();
        let c = e.embed("c", "किसानहरूले धान रोपे।").unwrap();
        let near = cosine(&a, &b).unwrap();
        let far = cosine(&a, &c).unwrap();
        assert!(near > far, "near={near} far={far}");
        assert!(near > 0.8);
        assert!(far < 0.5);
    }

    #[test]
    fn cosine_basics() {
        assert!((cosine(&[1.0, 0.0], &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap()).abs() < 1e-12);
        assert!((cosine(&[1.0, 0.0], &[-1.0, 0.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(
            cosine(&[1.0], &[1.0, 0.0]),
            Err(DedupError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(DedupError::ZeroVector { .. })
        ));
    }

    #[test]
    fn exact_dedup_keeps_first_and_respects_nfc() {
        // The same text with "क़" precomposed (U+0958) and as base + nukta
        // (U+0915 U+093C) normalizes to one NFC key: one duplicate.
        let precomposed = "यो \u{0958}िला हो।";
        let decomposed = "यो \u{0915}\u{093C}िला हो।";
        assert_ne!(precomposed, decomposed);
        let a = sentence("s1", precomposed, Category::GeneralCommunication);
        let b = sentence("s2", decomposed, Category::GeneralCommunication);
        let c = sentence("s3", "त्यो अर्कै किताब हो।", Category::GeneralCommunication);
        let (kept, dropped) = exact_dedup(vec![a, b, c]);
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[0].id, "s1");
        assert_eq!(kept[1].id, "s3");
        assert_eq!(dropped, vec!["s2".to_string()]);
    }

    #[test]
    fn semantic_filter_drops_near_duplicates_greedily() {
        let e = HashedNgramEmbedder::default();
        let s1 = sentence("s1", "आज काठमाडौंमा मौसम धेरै राम्रो छ।", Category::Agriculture);
        let s2 = sentence("s2", "आज काठमाडौंमा मौसम धेरै नराम्रो छ।", Category::Agriculture);
        let s3 = sentence("s3", "किसानहरूले खेतमा धान रोपे।", Category::Agriculture);
        let (kept, report) = semantic_filter(vec![s1, s2, s3], &e, 0.8).unwrap();
        assert_eq!(report.input, 3);
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[0].id, "s1");
        assert_eq!(kept[1].id, "s3");
        assert_eq!(report.dropped.len(), 1);
        assert_eq!(report.dropped[0].dropped_id, "s2");
        assert_eq!(report.dropped[0].kept_id, "s1");
        assert!(report.dropped[0].similarity > 0.8);
        // s2 compared against 1 kept, s3 against 1 kept: 2 comparisons, plus
        // s1 against zero kept.
        assert_eq!(report.comparisons_made, 2);
    }

    #[test]
    fn semantic_filter_threshold_is_strict() {
        struct Fixed;
        impl EmbeddingProvider for Fixed {
            fn dimension(&self) -> usize {
                2
            }
            fn embed(&self, id: &str, _text: &str) -> Result<Vec<f64>, DedupError> {
                // Dot product of the two is exactly the 0.8 threshold.
                Ok(match id {
                    "s1" => vec![1.0, 0.0],
                    _ => vec![0.8, 0.6],
                })
            }
        }
        let s1 = sentence("s1", "आजको मौसम राम्रो छ।", Category::Agriculture);
        let s2 = sentence("s2", "भोलिको मौसम खराब छ।", Category::Agriculture);
        let (kept, _) = semantic_filter(vec![s1, s2], &Fixed, 0.8).unwrap();
        // Similarity exactly 0.8 is NOT above the threshold: both kept.
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn semantic_filter_rejects_mixed_categories() {
        let e = HashedNgramEmbedder::default();
        let s1 = sentence("s1", "आजको मौसम राम्रो छ।", Category::Health);
        let s2 = sentence("s2", "धान राम्रो छ।", Category::Agriculture);
        assert!(matches!(
            semantic_filter(vec![s1, s2], &e, 0.8),
            Err(DedupError::MixedCategories(_))
        ));
    }

    #[test]
    fn file_backed_provider_parses_and_normalizes() {
        let data = "#dim\t3\ns1\t1,0,0\ns2\t0,2,0\n";
        let p = FileBackedProvider::from_reader(data.as_bytes(), "test").unwrap();
        assert_eq!(p.dimension(), 3);
        assert_eq!(p.len(), 2);
        assert_eq!(p.embed("s1", "").unwrap(), vec![1.0, 0.0, 0.0]);
        // Non-unit input was normalized on load.
        assert_eq!(p.embed("s2", "").unwrap(), vec![0.0, 1.0, 0.0]);
        assert!(matches!(
            p.embed("s9", ""),
            Err(DedupError::MissingVector { .. })
        ));
    }

    #[test]
    fn file_backed_provider_rejects_bad_lines() {
        assert!(matches!(
            FileBackedProvider::from_reader("s1 1,0".as_bytes(), "t"),
            Err(DedupError::MalformedVectorLine { .. })
        ));
        assert!(matches!(
            FileBackedProvider::from_reader("s1\t1,x".as_bytes(), "t"),
            Err(DedupError::MalformedVectorLine { .. })
        ));
        assert!(matches!(
            FileBackedProvider::from_reader("s1\t0,0".as_bytes(), "t"),
            Err(DedupError::ZeroVector { .. })
        ));
        assert!(matches!(
            FileBackedProvider::from_reader("s1\t1,0\ns2\t1,0,0".as_bytes(), "t"),
            Err(DedupError::MalformedVectorLine { .. })
        ));
    }

    #[test]
    fn index_query_matches_linear_scan_by_construction() {
        let entries = vec![
            ("a".to_string(), vec![1.0, 0.0]),
            ("b".to_string(), vec![0.6, 0.8]),
            ("c".to_string(), vec![0.0, 1.0]),
        ];
        let index = CandidateIndex::build(entries).unwrap();
        let hits = index.query(&[1.0, 0.0], 0.5).unwrap();
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].0, "a");
        assert!((hits[0].1 - 1.0).abs() < 1e-12);
        assert_eq!(hits[1].0, "b");
        assert!((hits[1].1 - 0.6).abs() < 1e-12);
    }

    #[test]
    fn index_rejects_non_unit_vectors() {
        let entries = vec![("a".to_string(), vec![2.0, 0.0])];
        assert!(matches!(
            CandidateIndex::build(entries),
            Err(DedupError::NotUnitLength { .. })
        ));
    }

    #[test]
    fn band_boundaries_are_thirds_of_the_threshold() {
        let b = BandBoundaries::thirds_of(0.8);
        assert!((b.low_max - 0.8 / 3.0).abs() < 1e-12);
        assert!((b.medium_max - 1.6 / 3.0).abs() < 1e-12);
        assert_eq!(b.band(0.1), SimilarityBand::Low);
        assert_eq!(b.band(0.4), SimilarityBand::Medium);
        assert_eq!(b.band(0.7), SimilarityBand::High);
        assert_eq!(b.band(0.8 / 3.0), SimilarityBand::Low);
    }

    #[test]
    fn band_assignment_uses_nearest_other_survivor() {
        let e = HashedNgramEmbedder::default();
        let mut sentences = vec![
            sentence("s1", "आज काठमाडौंमा मौसम राम्रो थियो।", Category::Agriculture),
            sentence("s2", "हिजो काठमाडौंमा मौसम राम्रो थियो।", Category::Agriculture),
            sentence("s3", "गाईले घाँस खान्छ।", Category::Agriculture),
            sentence("s4", "स्वास्थ्य जाँच गराऔं।", Category::Health),
        ];
        assign_similarity_bands(&mut sentences, &e, BandBoundaries::thirds_of(0.8)).unwrap();
        // s1/s2 are close: both land in the high band.
        assert_eq!(sentences[0].similarity_band, SimilarityBand::High);
        assert_eq!(sentences[1].similarity_band, SimilarityBand::High);
        // s3 is far from both but still gets a band.
        assert_ne!(sentences[2].similarity_band, SimilarityBand::Unassigned);
        // s4 is alone in its category: unassigned.
        assert_eq!(sentences[3].similarity_band, SimilarityBand::Unassigned);
        // Tense sanity on the fixture itself.
        assert_eq!(sentences[0].tense, Tense::Past);
    }
}
