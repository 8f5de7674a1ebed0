use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::{write_atomic, write_json};
use super::PipelineError;
use crate::corpus::{DocumentReport, Preprocessor, RawDocument, TimeSlicedCorpus};

/// Corpus-wide counts after ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub documents: usize,
    /// Tokens after punctuation removal and the length filter.
    pub words: usize,
    pub unique_words: usize,
    /// Distinct token types changed at least once by correction.
    pub corrected_words: usize,
    /// Total corrected token occurrences.
    pub corrected_tokens: usize,
    /// Mean document length after correction and stopword removal.
    pub average_document_length: f64,
    pub stopwords: usize,
    pub protected_words: usize,
    /// Mean of the per-document recognition ratios.
    pub mean_recognition_before: f64,
    pub mean_recognition_after: f64,
    /// Recognition ratios over all tokens of the corpus.
    pub corpus_recognition_before: f64,
    pub corpus_recognition_after: f64,
    pub vocabulary_size: usize,
    pub slices: usize,
    pub empty_documents: Vec<String>,
    pub dropped_periods: Vec<(i32, i32)>,
}

impl IngestReport {
    pub fn build(
        preprocessor: &Preprocessor,
        raw: &[RawDocument],
        reports: &[DocumentReport],
        corpus: &TimeSlicedCorpus,
    ) -> Self {
        let unique: BTreeSet<String> = raw
            .par_iter()
            .map(|d| {
                preprocessor
                    .tokenize(&Preprocessor::plain_text(d))
                    .into_iter()
                    .collect::<BTreeSet<String>>()
            })
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            });
        let corrected: BTreeSet<&String> = reports.iter().flat_map(|r| r.replacements.keys()).collect();
        let n = reports.len().max(1) as f64;
        let words: usize = reports.iter().map(|r| r.word_count).sum();
        let weighted = |f: fn(&DocumentReport) -> f64| {
            if words == 0 {
                1.0
            } else {
                reports.iter().map(|r| f(r) * r.word_count as f64).sum::<f64>() / words as f64
            }
        };
        let dicts = preprocessor.dictionaries();
        IngestReport {
            documents: reports.len(),
            words,
            unique_words: unique.len(),
            corrected_words: corrected.len(),
            corrected_tokens: reports.iter().map(|r| r.corrected_count).sum(),
            average_document_length: reports.iter().map(|r| r.clean_length as f64).sum::<f64>() / n,
            stopwords: dicts.stopwords().len(),
            protected_words: dicts.protected().len(),
            mean_recognition_before: reports.iter().map(|r| r.recognized_before).sum::<f64>() / n,
            mean_recognition_after: reports.iter().map(|r| r.recognized_after).sum::<f64>() / n,
            corpus_recognition_before: weighted(|r| r.recognized_before),
            corpus_recognition_after: weighted(|r| r.recognized_after),
            vocabulary_size: corpus.vocabulary.len(),
            slices: corpus.num_slices(),
            empty_documents: corpus.slice_rule.empty_documents.clone(),
            dropped_periods: corpus.slice_rule.dropped_periods.clone(),
        }
    }

    /// Two-column `(field, count)` rows in a fixed reporting order.
    pub fn table_rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("Number of documents", self.documents.to_string()),
            ("Number of words", self.words.to_string()),
            ("Number of unique words", self.unique_words.to_string()),
            ("Number of corrected words", self.corrected_words.to_string()),
            ("Average document length", format!("{:.0}", self.average_document_length)),
            ("Number of stopwords", self.stopwords.to_string()),
            ("Protected words", self.protected_words.to_string()),
        ]
    }
}

/// Documents and mean length per period of `period_years`, starting at the
/// first year of the corpus. Length counts every clean token, including
/// those outside the vocabulary. Periods without documents are left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRow {
    pub start_year: i32,
    pub end_year: i32,
    pub documents: usize,
    pub mean_length: f64,
}

pub fn period_summary(corpus: &TimeSlicedCorpus, period_years: i32) -> Vec<PeriodRow> {
    let Some(first) = corpus.documents().map(|(_, d)| d.year).min() else {
        return Vec::new();
    };
    let width = period_years.max(1);
    let mut bins: BTreeMap<i32, (usize, u64)> = BTreeMap::new();
    for (_, d) in corpus.documents() {
        let e = bins.entry((d.year - first).div_euclid(width)).or_insert((0, 0));
        e.0 += 1;
        e.1 += d.length() + u64::from(d.out_of_vocabulary);
    }
    bins.into_iter()
        .map(|(b, (n, len))| PeriodRow {
            start_year: first + b * width,
            end_year: first + b * width + width - 1,
            documents: n,
            mean_length: len as f64 / n as f64,
        })
        .collect()
}

/// A CSV table with its JSON sidecar written next to it.
pub fn write_table<T: Serialize + ?Sized>(
    dir: &Path,
    stem: &str,
    header: &[&str],
    rows: &[Vec<String>],
    sidecar: &T,
) -> Result<Vec<std::path::PathBuf>, PipelineError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| PipelineError::Data(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| PipelineError::Data(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| PipelineError::Data(e.to_string()))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write_atomic(&csv_path, &bytes)?;
    write_json(&json_path, sidecar)?;
    Ok(vec![csv_path, json_path])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{SliceRule, SlicedDocument, TimeSlice, Vocabulary};

    #[test]
    fn periods_group_by_width() {
        let doc = |id: &str, year: i32, n: u32| SlicedDocument {
            id: id.into(),
            year,
            counts: vec![(0, n)],
            out_of_vocabulary: 1,
        };
        let corpus = TimeSlicedCorpus {
            vocabulary: Vocabulary::from(vec!["w".to_string()]),
            slices: vec![TimeSlice {
                label: "all".into(),
                start_year: 1951,
                end_year: 1962,
                documents: vec![doc("a", 1951, 3), doc("b", 1955, 5), doc("c", 1956, 1), doc("d", 1962, 2)],
            }],
            slice_rule: SliceRule {
                first_year: 1951,
                bin_years: 12,
                min_df: 1,
                dropped_periods: vec![],
                empty_documents: vec![],
            },
        };
        let rows = period_summary(&corpus, 5);
        assert_eq!(rows.len(), 3);
        assert_eq!((rows[0].start_year, rows[0].end_year, rows[0].documents), (1951, 1955, 2));
        assert_eq!(rows[0].mean_length, 5.0);
        assert_eq!((rows[1].start_year, rows[1].documents), (1956, 1));
        assert_eq!((rows[2].start_year, rows[2].mean_length), (1961, 3.0));
    }
}
