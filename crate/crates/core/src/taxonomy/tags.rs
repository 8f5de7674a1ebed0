use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{MainArea, TaxonomyError, TopicTags};

/// One record per topic, ordered by topic id, plus the warnings produced
/// while filling in topics the file did not mention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagSet {
    pub tags: Vec<TopicTags>,
    pub warnings: Vec<String>,
}

impl TagSet {
    /// Every topic tagged `Other`.
    pub fn untagged(num_topics: usize) -> Self {
        TagSet {
            tags: (0..num_topics).map(TopicTags::untagged).collect(),
            warnings: Vec::new(),
        }
    }
}

fn parse_historical(raw: &str) -> Option<bool> {
    match raw.trim().to_lowercase().as_str() {
        "" | "false" | "no" | "0" | "n" => Some(false),
        "true" | "yes" | "1" | "y" | "#historical" | "historical" => Some(true),
        _ => None,
    }
}

/// Reads a tags table with header `topic_id,main_area,subareas,historical`.
/// Subareas are separated by `;`. Topics in `0..num_topics` that the table
/// does not mention become `Other`, with a warning each.
pub fn parse_tags<R: Read>(reader: R, num_topics: usize) -> Result<TagSet, TaxonomyError> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);

    let columns = ["topic_id", "main_area", "subareas", "historical"];
    let header_line = 1;
    let positions: Vec<Option<usize>> = match csv.headers() {
        Ok(h) if h.is_empty() => vec![None; 4],
        Ok(h) => columns
            .iter()
            .map(|c| h.iter().position(|f| f.eq_ignore_ascii_case(c)))
            .collect(),
        Err(e) => {
            return Err(TaxonomyError::Parse {
                line: header_line,
                message: e.to_string(),
            })
        }
    };
    let has_rows = positions.iter().any(Option::is_some);
    if has_rows && (positions[0].is_none() || positions[1].is_none()) {
        return Err(TaxonomyError::Parse {
            line: header_line,
            message: format!("header must name the columns {}", columns.join(", ")),
        });
    }

    let mut seen: BTreeMap<usize, (u64, TopicTags)> = BTreeMap::new();
    for record in csv.records() {
        let record = record.map_err(|e| TaxonomyError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = |i: Option<usize>| i.and_then(|i| record.get(i)).unwrap_or("");

        let raw_id = field(positions[0]);
        let topic_id: usize = raw_id.parse().map_err(|_| TaxonomyError::Parse {
            line,
            message: format!("topic_id `{raw_id}` is not a nonnegative integer"),
        })?;
        if topic_id >= num_topics {
            return Err(TaxonomyError::TopicOutOfRange {
                line,
                topic_id,
                num_topics,
            });
        }
        let raw_area = field(positions[1]);
        let main_area: MainArea = raw_area.parse().map_err(|value| TaxonomyError::UnknownMainArea { line, value })?;
        let subareas = field(positions[2])
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        let raw_hist = field(positions[3]);
        let historical = parse_historical(raw_hist).ok_or_else(|| TaxonomyError::Parse {
            line,
            message: format!("historical flag `{raw_hist}` is not a boolean"),
        })?;

        if let Some((first_line, _)) = seen.get(&topic_id) {
            return Err(TaxonomyError::DuplicateTopicId {
                topic_id,
                first_line: *first_line,
                second_line: line,
            });
        }
        seen.insert(
            topic_id,
            (
                line,
                TopicTags {
                    topic_id,
                    main_area,
                    subareas,
                    historical,
                },
            ),
        );
    }

    let mut warnings = Vec::new();
    let tags = (0..num_topics)
        .map(|k| match seen.remove(&k) {
            Some((_, t)) => t,
            None => {
                warnings.push(format!("topic {k} has no tags; using Other"));
                TopicTags::untagged(k)
            }
        })
        .collect();
    Ok(TagSet { tags, warnings })
}

pub fn load_tags(path: &Path, num_topics: usize) -> Result<TagSet, TaxonomyError> {
    let file = File::open(path).map_err(|source| TaxonomyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_tags(file, num_topics)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kant_epistemology_row() {
        let text = "topic_id,main_area,subareas,historical\n7,HistoryWesternPhil,Kant;Epistemology,true\n";
        let set = parse_tags(text.as_bytes(), 10).unwrap();
        assert_eq!(
            set.tags[7],
            TopicTags {
                topic_id: 7,
                main_area: MainArea::HistoryWesternPhil,
                subareas: vec!["Kant".into(), "Epistemology".into()],
                historical: true,
            }
        );
        assert_eq!(set.tags.len(), 10);
        assert_eq!(set.warnings.len(), 9);
    }

    #[test]
    fn empty_file_is_all_other() {
        let set = parse_tags("".as_bytes(), 3).unwrap();
        assert!(set.tags.iter().all(|t| t.main_area == MainArea::Other && !t.historical));
        assert_eq!(set.warnings.len(), 3);
        let header_only = parse_tags("topic_id,main_area,subareas,historical\n".as_bytes(), 2).unwrap();
        assert_eq!(header_only.warnings.len(), 2);
    }

    #[test]
    fn duplicate_names_both_lines() {
        let text = "topic_id,main_area,subareas,historical\n1,Other,,false\n0,Other,,\n1,ValueTheory,Ethics,false\n";
        match parse_tags(text.as_bytes(), 3) {
            Err(TaxonomyError::DuplicateTopicId {
                topic_id: 1,
                first_line: 2,
                second_line: 4,
            }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_rows_report_lines() {
        let text = "topic_id,main_area,subareas,historical\n0,Aesthetics,,false\n";
        assert!(matches!(
            parse_tags(text.as_bytes(), 3),
            Err(TaxonomyError::UnknownMainArea { line: 2, .. })
        ));
        let text = "topic_id,main_area,subareas,historical\n0,Other,,false\nx,Other,,false\n";
        assert!(matches!(parse_tags(text.as_bytes(), 3), Err(TaxonomyError::Parse { line: 3, .. })));
        let text = "topic_id,main_area,subareas,historical\n5,Other,,false\n";
        assert!(matches!(
            parse_tags(text.as_bytes(), 3),
            Err(TaxonomyError::TopicOutOfRange { line: 2, .. })
        ));
        let text = "topic_id,main_area,subareas,historical\n0,Other,,maybe\n";
        assert!(matches!(parse_tags(text.as_bytes(), 3), Err(TaxonomyError::Parse { line: 2, .. })));
    }

    #[test]
    fn human_labels_and_quoted_fields() {
        let text = "topic_id,main_area,subareas,historical\n0,\"Science, logic, and mathematics\",Logic; Truth ,no\n";
        let set = parse_tags(text.as_bytes(), 1).unwrap();
        assert_eq!(set.tags[0].main_area, MainArea::ScienceLogicMath);
        assert_eq!(set.tags[0].subareas, vec!["Logic", "Truth"]);
        assert!(set.warnings.is_empty());
    }
}
