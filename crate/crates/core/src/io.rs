//! Tab-separated intermediate files passed between pipeline stages.
//!
//! Two record shapes cover the hand-offs the command-line stages need:
//!
//! * **Cleaned records** carry sentences that survived cleaning but have
//!   not been annotated yet: `id`, `article_id`, `category`, `text`.
//! * **Annotated records** carry full [`AnnotatedSentence`] values:
//!   `id`, `category`, `word_count`, `length_class`, `tense`, `polarity`,
//!   `similarity_band`, `origin`, `source_article_id`, `text`.
//!
//! Both formats put free text in the final column, write one record per
//! line with a fixed header, and represent a missing article id as an
//! empty field. Text containing tabs, carriage returns, or newlines is
//! rejected at write time so every file round-trips losslessly.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::model::{
    AnnotatedSentence, Category, LengthClass, Origin, Polarity, SimilarityBand, Tense,
};

/// Header line of a cleaned-sentence file.
pub const CLEANED_HEADER: &str = "id\tarticle_id\tcategory\ttext";

/// Header line of an annotated-sentence file.
pub const ANNOTATED_HEADER: &str = "id\tcategory\tword_count\tlength_class\ttense\tpolarity\t\
     similarity_band\torigin\tsource_article_id\ttext";

/// Why reading or writing an intermediate file failed.
#[derive(Debug, Error)]
pub enum RecordError {
    /// The underlying reader or writer failed.
    #[error("i/o error on intermediate file")]
    Io(#[from] std::io::Error),
    /// A field contains a tab or line break and cannot be written.
    #[error("record {id} field {field} contains a tab or line break")]
    UnencodableField { id: String, field: &'static str },
    /// A line of the file does not match the expected format.
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// A sentence that passed cleaning and awaits annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanedRecord {
    /// Stable sentence id, unique within one pipeline run.
    pub id: String,
    /// Id of the article the sentence came from, if any.
    pub article_id: Option<String>,
    /// Category inherited from the source article.
    pub category: Category,
    /// The cleaned sentence text.
    pub text: String,
}

fn check_field(id: &str, field: &'static str, value: &str) -> Result<(), RecordError> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(RecordError::UnencodableField {
            id: id.to_string(),
            field,
        });
    }
    Ok(())
}

/// Writes cleaned records with a header line.
pub fn write_cleaned<W: Write>(
    mut writer: W,
    records: &[CleanedRecord],
) -> Result<(), RecordError> {
    let mut out = String::with_capacity(records.len() * 64 + CLEANED_HEADER.len() + 1);
    out.push_str(CLEANED_HEADER);
    out.push('\n');
    for record in records {
        check_field(&record.id, "id", &record.id)?;
        let article_id = record.article_id.as_deref().unwrap_or("");
        check_field(&record.id, "article_id", article_id)?;
        check_field(&record.id, "text", &record.text)?;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            record.id,
            article_id,
            record.category.as_str(),
            record.text
        );
    }
    writer.write_all(out.as_bytes())?;
    Ok(())
}

/// Reads a file produced by [`write_cleaned`].
pub fn read_cleaned<R: BufRead>(reader: R) -> Result<Vec<CleanedRecord>, RecordError> {
    let mut records = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let number = index + 1;
        if number == 1 {
            if line != CLEANED_HEADER {
                return Err(RecordError::Malformed {
                    line: number,
                    reason: format!("expected header {CLEANED_HEADER:?}"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(RecordError::Malformed {
                line: number,
                reason: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let category = Category::parse(fields[2]).ok_or_else(|| RecordError::Malformed {
            line: number,
            reason: format!("unknown category {:?}", fields[2]),
        })?;
        records.push(CleanedRecord {
            id: fields[0].to_string(),
            article_id: (!fields[1].is_empty()).then(|| fields[1].to_string()),
            category,
            text: fields[3].to_string(),
        });
    }
    Ok(records)
}

/// Writes annotated sentences with a header line.
pub fn write_annotated<W: Write>(
    mut writer: W,
    sentences: &[AnnotatedSentence],
) -> Result<(), RecordError> {
    let mut out = String::with_capacity(sentences.len() * 96 + ANNOTATED_HEADER.len() + 1);
    out.push_str(ANNOTATED_HEADER);
    out.push('\n');
    for s in sentences {
        check_field(&s.id, "id", &s.id)?;
        let article_id = s.source_article_id.as_deref().unwrap_or("");
        check_field(&s.id, "source_article_id", article_id)?;
        check_field(&s.id, "text", &s.text)?;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.id,
            s.category.as_str(),
            s.word_count,
            s.length_class.as_str(),
            s.tense.as_str(),
            s.polarity.as_str(),
            s.similarity_band.as_str(),
            s.origin.as_str(),
            article_id,
            s.text
        );
    }
    writer.write_all(out.as_bytes())?;
    Ok(())
}

fn parse_enum<T>(
    value: &str,
    what: &str,
    line: usize,
    parse: fn(&str) -> Option<T>,
) -> Result<T, RecordError> {
    parse(value).ok_or_else(|| RecordError::Malformed {
        line,
        reason: format!("unknown {what} {value:?}"),
    })
}

/// Reads a file produced by [`write_annotated`].
pub fn read_annotated<R: BufRead>(reader: R) -> Result<Vec<AnnotatedSentence>, RecordError> {
    let mut sentences = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let number = index + 1;
        if number == 1 {
            if line != ANNOTATED_HEADER {
                return Err(RecordError::Malformed {
                    line: number,
                    reason: format!("expected header {ANNOTATED_HEADER:?}"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 10 {
            return Err(RecordError::Malformed {
                line: number,
                reason: format!("expected 10 fields, found {}", fields.len()),
            });
        }
        let word_count: usize = fields[2].parse().map_err(|_| RecordError::Malformed {
            line: number,
            reason: format!("invalid word count {:?}", fields[2]),
        })?;
        sentences.push(AnnotatedSentence {
            id: fields[0].to_string(),
            text: fields[9].to_string(),
            category: parse_enum(fields[1], "category", number, Category::parse)?,
            word_count,
            length_class: parse_enum(fields[3], "length class", number, LengthClass::parse)?,
            tense: parse_enum(fields[4], "tense", number, Tense::parse)?,
            polarity: parse_enum(fields[5], "polarity", number, Polarity::parse)?,
            similarity_band: parse_enum(fields[6], "similarity band", number, SimilarityBand::parse)?,
            origin: parse_enum(fields[7], "origin", number, Origin::parse)?,
            source_article_id: (!fields[8].is_empty()).then(|| fields[8].to_string()),
        });
    }
    Ok(sentences)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_cleaned() -> Vec<CleanedRecord> {
        vec![
            CleanedRecord {
                id: "s000001".into(),
                article_id: Some("a1".into()),
                category: Category::Agriculture,
                text: "किसानले धान रोपे।".into(),
            },
            CleanedRecord {
                id: "s000002".into(),
                article_id: None,
                category: Category::Health,
                text: "बिरामी निको भए।".into(),
            },
        ]
    }

    fn sample_annotated() -> Vec<AnnotatedSentence> {
        vec![
            AnnotatedSentence {
                id: "s000001".into(),
                text: "किसानले धान रोपे।".into(),
                category: Category::Agriculture,
                word_count: 3,
                length_class: LengthClass::BelowMin,
                tense: Tense::Past,
                polarity: Polarity::Affirmative,
                similarity_band: SimilarityBand::Unassigned,
                source_article_id: Some("a1".into()),
                origin: Origin::Scraped,
            },
            AnnotatedSentence {
                id: "s000002".into(),
                text: "उपचार पाउँदैनन्।".into(),
                category: Category::Health,
                word_count: 2,
                length_class: LengthClass::BelowMin,
                tense: Tense::NonPast,
                polarity: Polarity::Negative,
                similarity_band: SimilarityBand::Low,
                source_article_id: None,
                origin: Origin::Borrowed,
            },
        ]
    }

    #[test]
    fn cleaned_records_round_trip() {
        let records = sample_cleaned();
        let mut buffer = Vec::new();
        write_cleaned(&mut buffer, &records).unwrap();
        let parsed = read_cleaned(buffer.as_slice()).unwrap();
        assert_eq!(parsed, records);
    }

    #[test]
    fn annotated_records_round_trip() {
        let sentences = sample_annotated();
        let mut buffer = Vec::new();
        write_annotated(&mut buffer, &sentences).unwrap();
        let parsed = read_annotated(buffer.as_slice()).unwrap();
        assert_eq!(parsed, sentences);
    }

    #[test]
    fn cleaned_write_is_byte_stable() {
        let records = sample_cleaned();
        let mut first = Vec::new();
        let mut second = Vec::new();
        write_cleaned(&mut first, &records).unwrap();
        write_cleaned(&mut second, &records).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with("id\tarticle_id\tcategory\ttext\n"));
        assert!(text.contains("s000002\t\tHealth\t"));
    }

    #[test]
    fn tab_in_text_is_rejected() {
        let mut records = sample_cleaned();
        records[0].text = "क\tख।".into();
        let err = write_cleaned(&mut Vec::new(), &records).unwrap_err();
        assert!(matches!(
            err,
            RecordError::UnencodableField { field: "text", .. }
        ));
    }

    #[test]
    fn newline_in_annotated_text_is_rejected() {
        let mut sentences = sample_annotated();
        sentences[1].text = "क\nख।".into();
        let err = write_annotated(&mut Vec::new(), &sentences).unwrap_err();
        assert!(matches!(
            err,
            RecordError::UnencodableField { field: "text", .. }
        ));
    }

    #[test]
    fn wrong_header_is_rejected() {
        let err = read_cleaned("id\ttext\nx\ty".as_bytes()).unwrap_err();
        assert!(matches!(err, RecordError::Malformed { line: 1, .. }));
    }

    #[test]
    fn wrong_field_count_is_rejected() {
        let input = format!("{CLEANED_HEADER}\ns1\ta1\tAgriculture\n");
        let err = read_cleaned(input.as_bytes()).unwrap_err();
        assert!(matches!(err, RecordError::Malformed { line: 2, .. }));
    }

    #[test]
    fn unknown_enum_value_is_rejected() {
        let input = format!("{CLEANED_HEADER}\ns1\ta1\tWeather\tपाठ।\n");
        let err = read_cleaned(input.as_bytes()).unwrap_err();
        match err {
            RecordError::Malformed { line, reason } => {
                assert_eq!(line, 2);
                assert!(reason.contains("Weather"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
