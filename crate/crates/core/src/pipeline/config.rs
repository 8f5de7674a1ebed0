use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::corpus::Language;
use crate::model::Hyperparams;
use crate::selection::{GridSpec, RankWeights};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Directory of `.txt`/`.html` files plus `metadata.json`.
    pub corpus_dir: Option<PathBuf>,
    pub frequency_dict: Option<PathBuf>,
    pub custom_dict: Option<PathBuf>,
    pub lemma_dict: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub protected: Option<PathBuf>,
    pub tags: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// Model used by `assign` and `report`; defaults to `models/<K>-<seed>`.
    pub model_dir: Option<PathBuf>,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            corpus_dir: None,
            frequency_dict: None,
            custom_dict: None,
            lemma_dict: None,
            stopwords: None,
            protected: None,
            tags: None,
            output_dir: PathBuf::from("out"),
            model_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    /// Width of a time slice in years.
    pub bin_years: i32,
    /// Words in fewer documents than this are dropped from the vocabulary.
    pub min_df: u32,
    /// Languages to keep; empty keeps every document.
    pub languages: Vec<Language>,
    pub max_edit_distance: usize,
    pub min_token_len: usize,
    pub correct: bool,
    pub min_year: i32,
    pub max_year: i32,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            bin_years: 1,
            min_df: 1,
            languages: Vec::new(),
            max_edit_distance: 2,
            min_token_len: 3,
            correct: true,
            min_year: 0,
            max_year: 9999,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub assignment_mass: f64,
    /// First year of the historical-ratio regression; `None` uses every year.
    pub from_year: Option<i32>,
    pub top_words: usize,
    pub subareas_per_area: usize,
    /// Historical topics need more than this many documents to be listed.
    pub historical_min_docs: usize,
    /// Period width of the document-count summary.
    pub period_years: i32,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            assignment_mass: 0.5,
            from_year: None,
            top_words: 10,
            subareas_per_area: 5,
            historical_min_docs: 5,
            period_years: 5,
        }
    }
}

/// Everything a pipeline run needs. Loaded from TOML; command-line flags are
/// applied on top by the caller.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: PathsConfig,
    pub ingest: IngestConfig,
    pub model: Hyperparams,
    pub grid: GridSpec,
    pub rank: RankWeights,
    pub analysis: AnalysisConfig,
    /// Worker threads; defaults to the number of CPUs.
    pub workers: Option<usize>,
}

fn resolve(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl PipelineConfig {
    /// Reads a TOML file. Relative paths inside it are taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path)
            .map_err(|e| PipelineError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: PipelineConfig = toml::from_str(&text)
            .map_err(|e| PipelineError::Usage(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let p = &mut cfg.paths;
        for field in [
            &mut p.corpus_dir,
            &mut p.frequency_dict,
            &mut p.custom_dict,
            &mut p.lemma_dict,
            &mut p.stopwords,
            &mut p.protected,
            &mut p.tags,
            &mut p.model_dir,
        ] {
            resolve(base, field);
        }
        if p.output_dir.is_relative() {
            p.output_dir = base.join(&p.output_dir);
        }
        Ok(cfg)
    }

    /// Range checks on numeric options.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let usage = |m: String| Err(PipelineError::Usage(m));
        if self.ingest.bin_years < 1 {
            return usage(format!("ingest.bin_years must be at least 1, got {}", self.ingest.bin_years));
        }
        if self.ingest.min_token_len == 0 {
            return usage("ingest.min_token_len must be at least 1".into());
        }
        if self.ingest.min_year > self.ingest.max_year {
            return usage("ingest.min_year is after ingest.max_year".into());
        }
        let mass = self.analysis.assignment_mass;
        if !(mass > 0.0 && mass <= 1.0) {
            return usage(format!("analysis.assignment_mass must be in (0, 1], got {mass}"));
        }
        if self.analysis.period_years < 1 {
            return usage("analysis.period_years must be at least 1".into());
        }
        if self.workers == Some(0) {
            return usage("workers must be at least 1".into());
        }
        self.model
            .validate()
            .map_err(|e| PipelineError::Usage(format!("model: {e}")))?;
        self.grid
            .validate()
            .map_err(|e| PipelineError::Usage(e.to_string()))?;
        Ok(())
    }

    /// Checks that an optional input path, if given, exists.
    pub(crate) fn existing(path: &Option<PathBuf>, what: &str) -> Result<Option<PathBuf>, PipelineError> {
        match path {
            Some(p) if !p.exists() => Err(PipelineError::Usage(format!("{what} {} does not exist", p.display()))),
            other => Ok(other.clone()),
        }
    }

    pub fn model_dir(&self) -> PathBuf {
        self.paths.model_dir.clone().unwrap_or_else(|| {
            self.paths
                .output_dir
                .join("models")
                .join(format!("{}-{}", self.model.num_topics, self.model.seed))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            "workers = 2\n[paths]\ncorpus_dir = \"docs\"\noutput_dir = \"/abs/out\"\n[model]\nnum_topics = 4\nalpha0 = [0.0, 0.1, 0.2, 0.3]\n[ingest]\nlanguages = [\"es\"]\n",
        )
        .unwrap();
        let cfg = PipelineConfig::load(&path).unwrap();
        assert_eq!(cfg.paths.corpus_dir, Some(dir.path().join("docs")));
        assert_eq!(cfg.paths.output_dir, PathBuf::from("/abs/out"));
        assert_eq!(cfg.model.num_topics, 4);
        assert_eq!(cfg.ingest.languages, vec![Language::Spanish]);
        assert_eq!(cfg.workers, Some(2));
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.model_dir(), PathBuf::from("/abs/out/models/4-0"));
    }

    #[test]
    fn unknown_keys_and_bad_ranges_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        fs::write(&path, "[ingest]\nbin_yeras = 5\n").unwrap();
        assert!(matches!(PipelineConfig::load(&path), Err(PipelineError::Usage(_))));
        let mut cfg = PipelineConfig::default();
        cfg.analysis.assignment_mass = 1.5;
        assert!(matches!(cfg.validate(), Err(PipelineError::Usage(_))));
    }
}
