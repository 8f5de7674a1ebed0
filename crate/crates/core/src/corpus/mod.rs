//! Corpus ingestion: markup stripping, tokenization, orthographic correction,
//! stopword removal, lemmatization and time slicing.
//!
//! The per-document stages run in a fixed order:
//!
//! ```text
//! strip_markup (markup sources only)
//!   -> normalize_and_tokenize
//!   -> correct_orthography
//!   -> remove_stopwords
//!   -> lemmatize
//! ```
//!
//! [`Preprocessor`] wires the stages together; [`build_time_slices`] turns the
//! resulting [`CleanDocument`]s into a vocabulary-indexed [`TimeSlicedCorpus`].

mod dictionary;
mod filters;
mod load;
mod markup;
mod preprocess;
mod slices;
mod spell;
mod tokenize;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dictionary::DictionaryBundle;
pub use filters::{lemmatize, remove_stopwords};
pub use load::{load_documents, DocumentMetadata, METADATA_FILE};
pub use markup::strip_markup;
pub use preprocess::{DocumentReport, PreprocessOptions, Preprocessor};
pub use slices::{
    build_time_slices, SliceRule, SlicedDocument, TimeSlice, TimeSlicedCorpus, Vocabulary,
};
pub use spell::{
    correct_orthography, edit_distance, recognition_ratio, Correction, SpellCorrector,
};
pub use tokenize::{normalize_and_tokenize, DEFAULT_MIN_TOKEN_LEN};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("frequency dictionary is empty")]
    EmptyDictionary,
    #[error("corpus contains no documents")]
    EmptyCorpus,
    #[error("every token was filtered out; the vocabulary is empty")]
    AllTokensFiltered,
    #[error("bin width must be at least one year, got {0}")]
    InvalidBinWidth(i32),
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("document `{id}` has year {year}, outside {min}..={max}")]
    YearOutOfRange { id: String, year: i32, min: i32, max: i32 },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("document `{0}` has no metadata entry")]
    MissingMetadata(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed corpus archive: {0}")]
    Archive(String),
}

impl CorpusError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Serialized by name; parsed from names or ISO codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum Language {
    Spanish,
    English,
    Portuguese,
    Unknown,
}

impl FromStr for Language {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_lowercase().as_str() {
            "spanish" | "es" | "spa" | "español" => Language::Spanish,
            "english" | "en" | "eng" => Language::English,
            "portuguese" | "pt" | "por" | "português" => Language::Portuguese,
            _ => Language::Unknown,
        })
    }
}

impl From<String> for Language {
    fn from(s: String) -> Self {
        s.parse().unwrap_or(Language::Unknown)
    }
}

impl From<Language> for String {
    fn from(l: Language) -> Self {
        l.to_string()
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Language::Spanish => "spanish",
            Language::English => "english",
            Language::Portuguese => "portuguese",
            Language::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Markup,
    Plain,
}

/// An article as extracted from its source, before any cleaning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub year: i32,
    pub language: Language,
    pub source_kind: SourceKind,
    pub text: String,
    pub metadata: BTreeMap<String, String>,
}

/// A normalized bag of tokens with its year stamp.
///
/// Every token has at least [`DEFAULT_MIN_TOKEN_LEN`] characters (or the
/// configured minimum) and none is an effective stopword.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanDocument {
    pub id: String,
    pub year: i32,
    pub tokens: Vec<String>,
    pub corrected_count: usize,
}
