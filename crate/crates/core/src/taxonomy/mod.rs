//! Human topic labels, document-to-topic assignment and the aggregations
//! built on them.

mod aggregate;
mod assign;
mod tags;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aggregate::{
    area_counts_by_year, area_word_profile, historical_ratio_series, historical_topic_table,
    largest_subarea_series, subarea_table, subarea_word_profile, AreaCounts, HistoricalRow,
    HistoricalSeries, SubareaRow, SubareaSeries,
};
pub use assign::{assign_all, assign_documents, empty_topics, unassigned_documents, TopicAssignment};
pub use tags::{load_tags, parse_tags, TagSet};

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("topic {topic_id} tagged twice (lines {first_line} and {second_line})")]
    DuplicateTopicId {
        topic_id: usize,
        first_line: u64,
        second_line: u64,
    },
    #[error("line {line}: unknown main area `{value}`")]
    UnknownMainArea { line: u64, value: String },
    #[error("line {line}: topic {topic_id} is outside a model with {num_topics} topics")]
    TopicOutOfRange {
        line: u64,
        topic_id: usize,
        num_topics: usize,
    },
    #[error("no topics tagged with {0}")]
    NoTopicsInArea(String),
    #[error("document `{0}` has no year")]
    UnknownDocId(String),
    #[error("assignment mass must be in (0, 1], got {0}")]
    InvalidMass(f64),
    #[error("topic {0} is not part of the model")]
    UnknownTopic(usize),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MainArea {
    ValueTheory,
    MetaphysicsEpistemology,
    ScienceLogicMath,
    HistoryWesternPhil,
    PhilTraditions,
    Other,
}

impl MainArea {
    pub const ALL: [MainArea; 6] = [
        MainArea::ValueTheory,
        MainArea::MetaphysicsEpistemology,
        MainArea::ScienceLogicMath,
        MainArea::HistoryWesternPhil,
        MainArea::PhilTraditions,
        MainArea::Other,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MainArea::ValueTheory => "Value theory",
            MainArea::MetaphysicsEpistemology => "Metaphysics and epistemology",
            MainArea::ScienceLogicMath => "Science, logic, and mathematics",
            MainArea::HistoryWesternPhil => "History of Western philosophy",
            MainArea::PhilTraditions => "Philosophical traditions",
            MainArea::Other => "Other",
        }
    }

    fn key(self) -> &'static str {
        match self {
            MainArea::ValueTheory => "ValueTheory",
            MainArea::MetaphysicsEpistemology => "MetaphysicsEpistemology",
            MainArea::ScienceLogicMath => "ScienceLogicMath",
            MainArea::HistoryWesternPhil => "HistoryWesternPhil",
            MainArea::PhilTraditions => "PhilTraditions",
            MainArea::Other => "Other",
        }
    }
}

impl fmt::Display for MainArea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

fn squash(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

impl FromStr for MainArea {
    type Err = String;

    /// Accepts the variant name or the human label, ignoring case,
    /// whitespace and punctuation.
    fn from_str(s: &str) -> Result<Self, String> {
        let wanted = squash(s);
        MainArea::ALL
            .into_iter()
            .find(|a| squash(a.key()) == wanted || squash(a.label()) == wanted)
            .ok_or_else(|| s.to_string())
    }
}

/// Labels a human annotator attached to one topic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicTags {
    pub topic_id: usize,
    pub main_area: MainArea,
    pub subareas: Vec<String>,
    pub historical: bool,
}

impl TopicTags {
    pub fn untagged(topic_id: usize) -> Self {
        TopicTags {
            topic_id,
            main_area: MainArea::Other,
            subareas: Vec::new(),
            historical: false,
        }
    }
}
