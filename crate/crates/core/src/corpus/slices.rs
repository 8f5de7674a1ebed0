use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CleanDocument, CorpusError};

/// Bijection between tokens and dense indices. Tokens are stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl From<Vec<String>> for Vocabulary {
    fn from(tokens: Vec<String>) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary { tokens, index }
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.tokens
    }
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: u32) -> &str {
        &self.tokens[index as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// A document as sparse `(word index, count)` pairs, sorted by index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlicedDocument {
    pub id: String,
    pub year: i32,
    pub counts: Vec<(u32, u32)>,
    /// Tokens of the clean document that fell outside the vocabulary.
    pub out_of_vocabulary: u32,
}

impl SlicedDocument {
    pub fn length(&self) -> u64 {
        self.counts.iter().map(|&(_, c)| c as u64).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub label: String,
    pub start_year: i32,
    pub end_year: i32,
    pub documents: Vec<SlicedDocument>,
}

/// How years were binned into slices, including what was dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceRule {
    pub first_year: i32,
    pub bin_years: i32,
    pub min_df: u32,
    /// Periods `(start, end)` with no documents; they have no slice.
    pub dropped_periods: Vec<(i32, i32)>,
    /// Documents with no in-vocabulary token.
    pub empty_documents: Vec<String>,
}

/// Vocabulary-indexed bag-of-words counts grouped into ordered slices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSlicedCorpus {
    pub vocabulary: Vocabulary,
    pub slices: Vec<TimeSlice>,
    pub slice_rule: SliceRule,
}

fn period_label(start: i32, end: i32) -> String {
    if start == end {
        start.to_string()
    } else {
        format!("{start}-{end}")
    }
}

/// Bins documents into periods of `bin_years` starting at the earliest year
/// and builds a vocabulary of tokens occurring in at least `min_df`
/// documents. Periods without documents are dropped and recorded in the
/// slice rule.
pub fn build_time_slices(
    docs: &[CleanDocument],
    bin_years: i32,
    min_df: u32,
) -> Result<TimeSlicedCorpus, CorpusError> {
    if bin_years < 1 {
        return Err(CorpusError::InvalidBinWidth(bin_years));
    }
    if docs.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut ids = BTreeSet::new();
    for d in docs {
        if !ids.insert(d.id.as_str()) {
            return Err(CorpusError::DuplicateId(d.id.clone()));
        }
    }

    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for d in docs {
        let distinct: BTreeSet<&str> = d.tokens.iter().map(String::as_str).collect();
        for t in distinct {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let vocabulary = Vocabulary::from(
        df.into_iter()
            .filter(|&(_, n)| n >= min_df)
            .map(|(t, _)| t.to_string())
            .collect::<Vec<_>>(),
    );
    if vocabulary.is_empty() {
        return Err(CorpusError::AllTokensFiltered);
    }

    let first_year = docs.iter().map(|d| d.year).min().expect("non-empty");
    let last_year = docs.iter().map(|d| d.year).max().expect("non-empty");
    let n_bins = (last_year - first_year).div_euclid(bin_years) + 1;

    let mut bins: Vec<Vec<SlicedDocument>> = vec![Vec::new(); n_bins as usize];
    let mut empty_documents = Vec::new();
    let mut ordered: Vec<&CleanDocument> = docs.iter().collect();
    ordered.sort_by(|a, b| (a.year, &a.id).cmp(&(b.year, &b.id)));
    for d in ordered {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        let mut oov = 0u32;
        for t in &d.tokens {
            match vocabulary.index_of(t) {
                Some(i) => *counts.entry(i).or_insert(0) += 1,
                None => oov += 1,
            }
        }
        if counts.is_empty() {
            empty_documents.push(d.id.clone());
            continue;
        }
        let bin = (d.year - first_year).div_euclid(bin_years) as usize;
        bins[bin].push(SlicedDocument {
            id: d.id.clone(),
            year: d.year,
            counts: counts.into_iter().collect(),
            out_of_vocabulary: oov,
        });
    }

    let mut slices = Vec::new();
    let mut dropped_periods = Vec::new();
    for (b, documents) in bins.into_iter().enumerate() {
        let start = first_year + b as i32 * bin_years;
        let end = start + bin_years - 1;
        if documents.is_empty() {
            dropped_periods.push((start, end));
        } else {
            slices.push(TimeSlice {
                label: period_label(start, end),
                start_year: start,
                end_year: end,
                documents,
            });
        }
    }
    if slices.is_empty() {
        return Err(CorpusError::AllTokensFiltered);
    }

    Ok(TimeSlicedCorpus {
        vocabulary,
        slices,
        slice_rule: SliceRule {
            first_year,
            bin_years,
            min_df,
            dropped_periods,
            empty_documents,
        },
    })
}

impl TimeSlicedCorpus {
    pub fn num_slices(&self) -> usize {
        self.slices.len()
    }

    pub fn num_documents(&self) -> usize {
        self.slices.iter().map(|s| s.documents.len()).sum()
    }

    /// Documents in slice order, each paired with its slice index.
    pub fn documents(&self) -> impl Iterator<Item = (usize, &SlicedDocument)> {
        self.slices
            .iter()
            .enumerate()
            .flat_map(|(t, s)| s.documents.iter().map(move |d| (t, d)))
    }

    pub fn total_tokens(&self) -> u64 {
        self.documents().map(|(_, d)| d.length()).sum()
    }

    /// Number of documents containing each vocabulary word.
    pub fn document_frequencies(&self) -> Vec<u32> {
        let mut df = vec![0u32; self.vocabulary.len()];
        for (_, d) in self.documents() {
            for &(w, _) in &d.counts {
                df[w as usize] += 1;
            }
        }
        df
    }

    /// Splits documents into two corpora sharing this vocabulary and slice
    /// rule. Slices left without documents are omitted from that side.
    pub fn partition<F>(&self, mut keep_left: F) -> (TimeSlicedCorpus, TimeSlicedCorpus)
    where
        F: FnMut(usize, &SlicedDocument) -> bool,
    {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (t, s) in self.slices.iter().enumerate() {
            let (l, r): (Vec<SlicedDocument>, Vec<SlicedDocument>) =
                s.documents.iter().cloned().partition(|d| keep_left(t, d));
            for (docs, side) in [(l, &mut left), (r, &mut right)] {
                if !docs.is_empty() {
                    side.push(TimeSlice {
                        label: s.label.clone(),
                        start_year: s.start_year,
                        end_year: s.end_year,
                        documents: docs,
                    });
                }
            }
        }
        let make = |slices| TimeSlicedCorpus {
            vocabulary: self.vocabulary.clone(),
            slices,
            slice_rule: self.slice_rule.clone(),
        };
        (make(left), make(right))
    }

    /// Checks the structural invariants of an archive read from disk.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let v = self.vocabulary.len() as u32;
        let mut ids = BTreeSet::new();
        for pair in self.slices.windows(2) {
            if pair[0].start_year >= pair[1].start_year {
                return Err(CorpusError::Archive(format!(
                    "slices `{}` and `{}` are out of order",
                    pair[0].label, pair[1].label
                )));
            }
        }
        for (_, d) in self.documents() {
            if !ids.insert(d.id.as_str()) {
                return Err(CorpusError::DuplicateId(d.id.clone()));
            }
            if let Some(&(w, _)) = d.counts.iter().find(|&&(w, _)| w >= v) {
                return Err(CorpusError::Archive(format!(
                    "document `{}` references word {w} outside a vocabulary of {v}",
                    d.id
                )));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        let json = serde_json::to_string(self).map_err(|e| CorpusError::Archive(e.to_string()))?;
        fs::write(path, json).map_err(|e| CorpusError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
        let corpus: TimeSlicedCorpus =
            serde_json::from_str(&text).map_err(|e| CorpusError::Archive(e.to_string()))?;
        corpus.validate()?;
        Ok(corpus)
    }
}
