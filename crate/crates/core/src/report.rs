//! Distribution statistics and the on-disk corpus format.
//!
//! A corpus is written as four line-aligned files plus a JSON header:
//! `corpus.src.txt` (source sentences), `corpus.tgt.txt` (translations),
//! `corpus.meta.tsv` (one row of labels per pair, same order), `stats.txt`
//! (human-readable distribution tables), and `manifest.json` (seed, config
//! hash, pair count, and the same statistics in machine-readable form).
//! [`load_manifest`] reconstructs the exact in-memory corpus from these
//! files, and everything written is deterministic: the same corpus always
//! produces byte-identical output.
//!
//! Percentages are reported in tenths of a percent, rounded half-up with
//! pure integer arithmetic, so displayed tables are reproducible exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    AnnotatedSentence, Category, CorpusManifest, LengthClass, Origin, ParallelPair, Polarity,
    SimilarityBand, Split, Tense,
};

/// Errors from writing or reading a corpus directory.
#[derive(Debug, Error)]
pub enum ReportError {
    /// A file could not be read or written.
    #[error("i/o on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// A text field contains a tab or line break and cannot be serialized.
    #[error("pair {id}: {field} contains a tab or line break")]
    UnencodableText { id: String, field: &'static str },
    /// A corpus directory's files disagree with each other.
    #[error("corrupt corpus in {path}: {reason}")]
    Corrupt { path: String, reason: String },
}

/// A share in tenths of a percent, rounded half-up: 391 means 39.1%.
///
/// Computed as `(2 * count * 1000 + total) / (2 * total)` in integers, so
/// every caller rounds identically with no floating point involved.
pub fn percent_tenths(count: usize, total: usize) -> u64 {
    if total == 0 {
        return 0;
    }
    (2 * count as u64 * 1000 + total as u64) / (2 * total as u64)
}

/// Renders tenths of a percent as a decimal string: 391 becomes "39.1".
pub fn percent_string(tenths: u64) -> String {
    format!("{}.{}", tenths / 10, tenths % 10)
}

/// One labelled count within a column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisRow {
    pub label: String,
    pub count: usize,
    /// Share of the column total, in tenths of a percent.
    pub percent_tenths: u64,
}

/// Distribution of one slice of the corpus (e.g. the train split) over
/// every classification axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnStats {
    /// Which slice this is: "train", "test", "unassigned", or an origin.
    pub name: String,
    /// Pairs in the slice.
    pub total: usize,
    pub category: Vec<AxisRow>,
    pub length: Vec<AxisRow>,
    pub tense: Vec<AxisRow>,
    pub polarity: Vec<AxisRow>,
}

/// Distribution statistics for a whole corpus, one column per slice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub columns: Vec<ColumnStats>,
}

fn axis_rows<K: Copy + Ord>(
    sentences: &[&AnnotatedSentence],
    all: &[K],
    always: impl Fn(K) -> bool,
    key: impl Fn(&AnnotatedSentence) -> K,
    label: impl Fn(K) -> &'static str,
) -> Vec<AxisRow> {
    let total = sentences.len();
    let mut counts: BTreeMap<K, usize> = BTreeMap::new();
    for s in sentences {
        *counts.entry(key(s)).or_insert(0) += 1;
    }
    let mut rows = Vec::new();
    for &k in all {
        let count = counts.get(&k).copied().unwrap_or(0);
        if count > 0 || always(k) {
            rows.push(AxisRow {
                label: label(k).to_string(),
                count,
                percent_tenths: percent_tenths(count, total),
            });
        }
    }
    rows
}

/// Statistics of one named slice of pairs.
fn column_stats(name: &str, pairs: &[&ParallelPair]) -> ColumnStats {
    let sentences: Vec<&AnnotatedSentence> = pairs.iter().map(|p| &p.nepali).collect();
    ColumnStats {
        name: name.to_string(),
        total: pairs.len(),
        category: axis_rows(&sentences, &Category::ALL, |_| true, |s| s.category, Category::as_str),
        // The edge length classes appear only when present; a well-formed
        // corpus filters them out before sampling.
        length: axis_rows(
            &sentences,
            &LengthClass::ALL,
            |k| !matches!(k, LengthClass::BelowMin | LengthClass::OutOfRange),
            |s| s.length_class,
            LengthClass::as_str,
        ),
        tense: axis_rows(&sentences, &Tense::ALL, |_| true, |s| s.tense, Tense::as_str),
        polarity: axis_rows(&sentences, &Polarity::ALL, |_| true, |s| s.polarity, Polarity::as_str),
    }
}

/// Distribution statistics over a corpus: train and test columns always,
/// an unassigned column when any pair lacks a split, and one column per
/// origin when the corpus mixes origins.
pub fn corpus_stats(pairs: &[ParallelPair]) -> DistributionTable {
    let mut columns = Vec::new();
    let by_split = |split: Split| -> Vec<&ParallelPair> {
        pairs.iter().filter(|p| p.split == split).collect()
    };
    columns.push(column_stats("train", &by_split(Split::Train)));
    columns.push(column_stats("test", &by_split(Split::Test)));
    let unassigned = by_split(Split::Unassigned);
    if !unassigned.is_empty() {
        columns.push(column_stats("unassigned", &unassigned));
    }
    let origins: Vec<Origin> = Origin::ALL
        .into_iter()
        .filter(|&o| pairs.iter().any(|p| p.nepali.origin == o))
        .collect();
    if origins.len() > 1 {
        for origin in origins {
            let slice: Vec<&ParallelPair> =
                pairs.iter().filter(|p| p.nepali.origin == origin).collect();
            columns.push(column_stats(&origin.as_str().to_lowercase(), &slice));
        }
    }
    DistributionTable { columns }
}

/// Renders the distribution table as aligned, human-readable text.
pub fn render_stats(table: &DistributionTable) -> String {
    let mut out = String::new();
    for column in &table.columns {
        let _ = writeln!(out, "== {} ({} pairs) ==", column.name, column.total);
        for (axis, rows) in [
            ("category", &column.category),
            ("length", &column.length),
            ("tense", &column.tense),
            ("polarity", &column.polarity),
        ] {
            let _ = writeln!(out, "{axis}:");
            for row in rows {
                let _ = writeln!(
                    out,
                    "  {:<24}{:>8}  {:>5}%",
                    row.label,
                    row.count,
                    percent_string(row.percent_tenths)
                );
            }
        }
        out.push('\n');
    }
    out
}

/// Serialized form of `manifest.json`.
#[derive(Debug, Serialize, Deserialize)]
struct ManifestHeader {
    seed: u64,
    pipeline_config_hash: String,
    pair_count: usize,
    stats: DistributionTable,
}

const META_HEADER: &str = "pair_id\tsplit\tsentence_id\tcategory\tword_count\tlength_class\ttense\tpolarity\tsimilarity_band\torigin\tsource_article_id";

fn encodable<'a>(id: &str, field: &'static str, value: &'a str) -> Result<&'a str, ReportError> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(ReportError::UnencodableText {
            id: id.to_string(),
            field,
        });
    }
    Ok(value)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), ReportError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_file(dir: &Path, name: &str) -> Result<String, ReportError> {
    let path = dir.join(name);
    std::fs::read_to_string(&path).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes a corpus to `dir` as `corpus.src.txt`, `corpus.tgt.txt`,
/// `corpus.meta.tsv`, `stats.txt`, and `manifest.json`.
///
/// Output is deterministic: equal manifests produce byte-identical files.
pub fn emit_manifest(manifest: &CorpusManifest, dir: &Path) -> Result<(), ReportError> {
    std::fs::create_dir_all(dir).map_err(|source| ReportError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut src = String::new();
    let mut tgt = String::new();
    let mut meta = String::from(META_HEADER);
    meta.push('\n');
    for pair in &manifest.pairs {
        let s = &pair.nepali;
        src.push_str(encodable(&pair.id, "source text", &s.text)?);
        src.push('\n');
        tgt.push_str(encodable(&pair.id, "translation", &pair.tamang)?);
        tgt.push('\n');
        let source_article = s.source_article_id.as_deref().unwrap_or("");
        let _ = writeln!(
            meta,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            encodable(&pair.id, "pair id", &pair.id)?,
            pair.split.as_str(),
            encodable(&pair.id, "sentence id", &s.id)?,
            s.category.as_str(),
            s.word_count,
            s.length_class.as_str(),
            s.tense.as_str(),
            s.polarity.as_str(),
            s.similarity_band.as_str(),
            s.origin.as_str(),
            encodable(&pair.id, "source article id", source_article)?,
        );
    }
    let header = ManifestHeader {
        seed: manifest.seed,
        pipeline_config_hash: manifest.pipeline_config_hash.clone(),
        pair_count: manifest.pairs.len(),
        stats: manifest.stats.clone(),
    };
    let mut json = serde_json::to_string_pretty(&header).expect("stats serialize");
    json.push('\n');
    write_file(dir, "corpus.src.txt", &src)?;
    write_file(dir, "corpus.tgt.txt", &tgt)?;
    write_file(dir, "corpus.meta.tsv", &meta)?;
    write_file(dir, "stats.txt", &render_stats(&manifest.stats))?;
    write_file(dir, "manifest.json", &json)?;
    Ok(())
}

/// Reads a corpus directory written by [`emit_manifest`] back into memory.
///
/// The reconstruction is exact: `load_manifest(emit_manifest(m)) == m`.
pub fn load_manifest(dir: &Path) -> Result<CorpusManifest, ReportError> {
    let corrupt = |reason: String| ReportError::Corrupt {
        path: dir.display().to_string(),
        reason,
    };
    let src = read_file(dir, "corpus.src.txt")?;
    let tgt = read_file(dir, "corpus.tgt.txt")?;
    let meta = read_file(dir, "corpus.meta.tsv")?;
    let json = read_file(dir, "manifest.json")?;
    let header: ManifestHeader = serde_json::from_str(&json)
        .map_err(|e| corrupt(format!("manifest.json does not parse: {e}")))?;
    let src_lines: Vec<&str> = src.lines().collect();
    let tgt_lines: Vec<&str> = tgt.lines().collect();
    let mut meta_lines = meta.lines();
    if meta_lines.next() != Some(META_HEADER) {
        return Err(corrupt("corpus.meta.tsv header mismatch".to_string()));
    }
    let meta_rows: Vec<&str> = meta_lines.collect();
    if src_lines.len() != tgt_lines.len()
        || src_lines.len() != meta_rows.len()
        || src_lines.len() != header.pair_count
    {
        return Err(corrupt(format!(
            "line counts disagree: {} source, {} target, {} meta rows, {} declared",
            src_lines.len(),
            tgt_lines.len(),
            meta_rows.len(),
            header.pair_count
        )));
    }
    let mut pairs = Vec::with_capacity(meta_rows.len());
    for (i, ((row, text), tamang)) in meta_rows.iter().zip(&src_lines).zip(&tgt_lines).enumerate() {
        let lineno = i + 2; // 1-based, after the header
        let fields: Vec<&str> = row.split('\t').collect();
        if fields.len() != 11 {
            return Err(corrupt(format!(
                "meta line {lineno} has {} fields, expected 11",
                fields.len()
            )));
        }
        let parse_err =
            |what: &str| corrupt(format!("meta line {lineno}: unparseable {what}"));
        let pair = ParallelPair {
            id: fields[0].to_string(),
            split: Split::parse(fields[1]).ok_or_else(|| parse_err("split"))?,
            nepali: AnnotatedSentence {
                id: fields[2].to_string(),
                text: text.to_string(),
                category: Category::parse(fields[3]).ok_or_else(|| parse_err("category"))?,
                word_count: fields[4].parse().map_err(|_| parse_err("word count"))?,
                length_class: LengthClass::parse(fields[5])
                    .ok_or_else(|| parse_err("length class"))?,
                tense: Tense::parse(fields[6]).ok_or_else(|| parse_err("tense"))?,
                polarity: Polarity::parse(fields[7]).ok_or_else(|| parse_err("polarity"))?,
                similarity_band: SimilarityBand::parse(fields[8])
                    .ok_or_else(|| parse_err("similarity band"))?,
                origin: Origin::parse(fields[9]).ok_or_else(|| parse_err("origin"))?,
                source_article_id: if fields[10].is_empty() {
                    None
                } else {
                    Some(fields[10].to_string())
                },
            },
            tamang: tamang.to_string(),
        };
        pairs.push(pair);
    }
    Ok(CorpusManifest {
        pairs,
        stats: header.stats,
        seed: header.seed,
        pipeline_config_hash: header.pipeline_config_hash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Origin;

    #[test]
    fn percent_tenths_rounds_half_up() {
        assert_eq!(percent_tenths(5863, 15000), 391);
        assert_eq!(percent_tenths(6793, 15000), 453);
        assert_eq!(percent_tenths(1552, 15000), 103);
        assert_eq!(percent_tenths(823, 15000), 55);
        // Exact halves round up.
        assert_eq!(percent_tenths(1, 16), 63); // 6.25% -> 62.5 tenths -> 63
        assert_eq!(percent_tenths(3, 16), 188); // 18.75% -> 187.5 -> 188
        assert_eq!(percent_tenths(0, 10), 0);
        assert_eq!(percent_tenths(10, 10), 1000);
        assert_eq!(percent_tenths(5, 0), 0);
    }

    #[test]
    fn percent_string_formats_tenths() {
        assert_eq!(percent_string(391), "39.1");
        assert_eq!(percent_string(1000), "100.0");
        assert_eq!(percent_string(0), "0.0");
        assert_eq!(percent_string(55), "5.5");
    }

    fn sentence(id: &str, category: Category, tense: Tense) -> AnnotatedSentence {
        AnnotatedSentence {
            id: id.to_string(),
            text: "यो परीक्षण वाक्य हो।".to_string(),
            category,
            word_count: 4,
            length_class: LengthClass::Short,
            tense,
            polarity: Polarity::Affirmative,
            similarity_band: SimilarityBand::Low,
            source_article_id: Some("a00001".to_string()),
            origin: Origin::Scraped,
        }
    }

    fn pair(i: usize, split: Split, category: Category, tense: Tense) -> ParallelPair {
        ParallelPair {
            id: format!("p{i:06}"),
            nepali: sentence(&format!("s{i:06}"), category, tense),
            tamang: "तामाङ अनुवाद।".to_string(),
            split,
        }
    }

    #[test]
    fn stats_emit_fixed_rows_per_axis() {
        let pairs: Vec<ParallelPair> = (0..10)
            .map(|i| {
                pair(
                    i,
                    if i < 8 { Split::Train } else { Split::Test },
                    Category::ALL[i % 5],
                    Tense::NonPast,
                )
            })
            .collect();
        let table = corpus_stats(&pairs);
        // train and test only: no unassigned pairs, single origin.
        assert_eq!(table.columns.len(), 2);
        let train = &table.columns[0];
        assert_eq!(train.name, "train");
        assert_eq!(train.total, 8);
        // All five categories listed even when zero; Unknown rows always
        // listed for tense and polarity; edge lengths absent when zero.
        assert_eq!(train.category.len(), 5);
        assert_eq!(train.tense.len(), 3);
        assert!(train.tense.iter().any(|r| r.label == "Unknown" && r.count == 0));
        assert_eq!(train.polarity.len(), 3);
        assert_eq!(train.length.len(), 4);
        assert!(train.length.iter().all(|r| r.label != "BelowMin"));
    }

    #[test]
    fn unassigned_and_origin_columns_appear_when_present() {
        let mut pairs: Vec<ParallelPair> = (0..4)
            .map(|i| pair(i, Split::Train, Category::Agriculture, Tense::Past))
            .collect();
        pairs.push(pair(4, Split::Unassigned, Category::Health, Tense::Unknown));
        pairs[3].nepali.origin = Origin::Borrowed;
        let table = corpus_stats(&pairs);
        let names: Vec<&str> = table.columns.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, vec!["train", "test", "unassigned", "scraped", "borrowed"]);
    }

    #[test]
    fn percentages_in_stats_use_the_shared_rule() {
        let pairs: Vec<ParallelPair> = (0..3)
            .map(|i| pair(i, Split::Train, Category::Agriculture, Tense::Past))
            .chain(std::iter::once(pair(
                3,
                Split::Train,
                Category::Health,
                Tense::NonPast,
            )))
            .collect();
        let table = corpus_stats(&pairs);
        let train = &table.columns[0];
        let agriculture = train.category.iter().find(|r| r.label == "Agriculture").unwrap();
        assert_eq!(agriculture.count, 3);
        assert_eq!(agriculture.percent_tenths, percent_tenths(3, 4));
        assert_eq!(agriculture.percent_tenths, 750);
    }

    #[test]
    fn manifest_round_trips_exactly() {
        let pairs: Vec<ParallelPair> = (0..6)
            .map(|i| {
                let mut p = pair(
                    i,
                    if i % 3 == 0 { Split::Test } else { Split::Train },
                    Category::ALL[i % 5],
                    if i % 2 == 0 { Tense::Past } else { Tense::NonPast },
                );
                if i == 2 {
                    p.nepali.source_article_id = None;
                    p.nepali.origin = Origin::Borrowed;
                }
                p
            })
            .collect();
        let manifest = CorpusManifest {
            stats: corpus_stats(&pairs),
            pairs,
            seed: 99,
            pipeline_config_hash: "abc123".to_string(),
        };
        let dir = tempfile::tempdir().unwrap();
        emit_manifest(&manifest, dir.path()).unwrap();
        let loaded = load_manifest(dir.path()).unwrap();
        assert_eq!(loaded, manifest);
        // Re-emitting the loaded manifest is byte-identical.
        let dir2 = tempfile::tempdir().unwrap();
        emit_manifest(&loaded, dir2.path()).unwrap();
        for name in [
            "corpus.src.txt",
            "corpus.tgt.txt",
            "corpus.meta.tsv",
            "stats.txt",
            "manifest.json",
        ] {
            let a = std::fs::read(dir.path().join(name)).unwrap();
            let b = std::fs::read(dir2.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs");
        }
    }

    #[test]
    fn emit_rejects_tabs_and_newlines_in_text() {
        let mut p = pair(0, Split::Train, Category::Agriculture, Tense::Past);
        p.tamang = "तामाङ\tअनुवाद।".to_string();
        let manifest = CorpusManifest {
            stats: corpus_stats(std::slice::from_ref(&p)),
            pairs: vec![p],
            seed: 0,
            pipeline_config_hash: String::new(),
        };
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            emit_manifest(&manifest, dir.path()),
            Err(ReportError::UnencodableText { .. })
        ));
    }

    #[test]
    fn load_rejects_disagreeing_files() {
        let p = pair(0, Split::Train, Category::Agriculture, Tense::Past);
        let manifest = CorpusManifest {
            stats: corpus_stats(std::slice::from_ref(&p)),
            pairs: vec![p],
            seed: 0,
            pipeline_config_hash: String::new(),
        };
        let dir = tempfile::tempdir().unwrap();
        emit_manifest(&manifest, dir.path()).unwrap();
        std::fs::write(
            dir.path().join("corpus.tgt.txt"),
            "पहिलो।\nदोस्रो।\n",
        )
        .unwrap();
        assert!(matches!(
            load_manifest(dir.path()),
            Err(ReportError::Corrupt { .. })
        ));
    }

    #[test]
    fn rendered_stats_include_counts_and_percents() {
        let pairs: Vec<ParallelPair> = (0..4)
            .map(|i| pair(i, Split::Train, Category::Agriculture, Tense::Past))
            .collect();
        let text = render_stats(&corpus_stats(&pairs));
        assert!(text.contains("== train (4 pairs) =="));
        assert!(text.contains("Agriculture"));
        assert!(text.contains("100.0%"));
        assert!(text.contains("tense:"));
    }
}
