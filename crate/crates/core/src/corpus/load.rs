use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Language, RawDocument, SourceKind};

/// Name of the sidecar metadata file inside a corpus directory.
pub const METADATA_FILE: &str = "metadata.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Authors {
    One(String),
    Many(Vec<String>),
}

/// One entry of the sidecar metadata file, keyed by document id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentMetadata {
    pub year: i32,
    #[serde(default)]
    pub language: Option<String>,
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    authors: Option<Authors>,
}

impl DocumentMetadata {
    fn into_map(self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        if let Some(t) = self.title {
            m.insert("title".into(), t);
        }
        match self.authors {
            Some(Authors::One(a)) => {
                m.insert("authors".into(), a);
            }
            Some(Authors::Many(a)) => {
                m.insert("authors".into(), a.join("; "));
            }
            None => {}
        }
        m
    }
}

/// Reads every `.txt`, `.html` and `.htm` file in `dir` together with the
/// sidecar [`METADATA_FILE`]. The document id is the file stem. Documents are
/// returned sorted by id.
pub fn load_documents(dir: &Path, year_range: (i32, i32)) -> Result<Vec<RawDocument>, CorpusError> {
    let meta_path = dir.join(METADATA_FILE);
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| CorpusError::io(&meta_path, e))?;
    let mut metadata: BTreeMap<String, DocumentMetadata> =
        serde_json::from_str(&meta_text).map_err(|e| CorpusError::Parse {
            path: meta_path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;

    let mut entries: Vec<_> = fs::read_dir(dir)
        .map_err(|e| CorpusError::io(dir, e))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    entries.sort();

    let mut seen = BTreeSet::new();
    let mut docs = Vec::new();
    for path in entries {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        let source_kind = match ext.as_deref() {
            Some("txt") => SourceKind::Plain,
            Some("html") | Some("htm") => SourceKind::Markup,
            _ => continue,
        };
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId(id));
        }
        let meta = metadata
            .remove(&id)
            .ok_or_else(|| CorpusError::MissingMetadata(id.clone()))?;
        if meta.year < year_range.0 || meta.year > year_range.1 {
            return Err(CorpusError::YearOutOfRange {
                id,
                year: meta.year,
                min: year_range.0,
                max: year_range.1,
            });
        }
        let bytes = fs::read(&path).map_err(|e| CorpusError::io(&path, e))?;
        let language = meta
            .language
            .as_deref()
            .map(|l| l.parse().unwrap_or(Language::Unknown))
            .unwrap_or(Language::Unknown);
        docs.push(RawDocument {
            id,
            year: meta.year,
            language,
            source_kind,
            text: String::from_utf8_lossy(&bytes).into_owned(),
            metadata: meta.into_map(),
        });
    }
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_text_and_markup_with_metadata() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "Texto plano").unwrap();
        fs::write(dir.path().join("b.html"), "<p>Texto</p>").unwrap();
        fs::write(dir.path().join("notes.md"), "ignored").unwrap();
        fs::write(
            dir.path().join(METADATA_FILE),
            r#"{"a": {"year": 1951, "language": "spanish", "title": "A", "authors": ["X", "Y"]},
                "b": {"year": 1990, "language": "english"}}"#,
        )
        .unwrap();
        let docs = load_documents(dir.path(), (1900, 2100)).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].source_kind, SourceKind::Plain);
        assert_eq!(docs[0].language, Language::Spanish);
        assert_eq!(docs[0].metadata["authors"], "X; Y");
        assert_eq!(docs[1].source_kind, SourceKind::Markup);
        assert_eq!(docs[1].language, Language::English);
    }

    #[test]
    fn missing_metadata_and_year_range() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "x").unwrap();
        fs::write(dir.path().join(METADATA_FILE), "{}").unwrap();
        assert!(matches!(
            load_documents(dir.path(), (1900, 2100)),
            Err(CorpusError::MissingMetadata(_))
        ));
        fs::write(dir.path().join(METADATA_FILE), r#"{"a": {"year": 1800}}"#).unwrap();
        assert!(matches!(
            load_documents(dir.path(), (1900, 2100)),
            Err(CorpusError::YearOutOfRange { .. })
        ));
    }
}
