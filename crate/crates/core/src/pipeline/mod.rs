//! File-based pipeline behind the command-line tool: ingest, train, grid,
//! assign, report and trend. Each command reads earlier stages' outputs from
//! the output directory and writes its own stage directory:
//!
//! ```text
//! <output>/ingest/             corpus.json, report.json, summary.csv, recognition.csv
//! <output>/models/<K>-<seed>/  model.json, beta.bin, doc_topics.csv, topic_words.csv
//! <output>/grid/               metrics.csv, ranking.csv (+ JSON), cells/<K>-<seed>/
//! <output>/assign/             assignments.csv, topics.csv, unassigned.csv
//! <output>/reports/            one CSV per table or figure series, each with a JSON sidecar
//! <output>/trend/              trend.json, band.csv
//! ```
//!
//! Every stage directory holds a `manifest.json` listing each run that wrote
//! there, with input and output hashes and timings.

mod commands;
mod config;
mod manifest;
mod report;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use commands::{
    cmd_assign, cmd_grid, cmd_ingest, cmd_report, cmd_train, cmd_trend, AssignOutcome, GridOutcome,
    IngestOutcome, ReportOutcome, TrainOutcome, TrendOutcome,
};
pub use config::{AnalysisConfig, IngestConfig, PathsConfig, PipelineConfig};
pub use manifest::{
    hash_inputs, sha256_file, OutputLock, RunManifest, RunRecord, StageTiming, MANIFEST_FILE,
};
pub use report::{period_summary, IngestReport, PeriodRow};

use crate::corpus::CorpusError;
use crate::model::ModelError;
use crate::selection::SelectionError;
use crate::taxonomy::TaxonomyError;
use crate::trend::TrendError;

/// Failures grouped by how the command line reports them.
#[derive(Debug, Error)]
pub enum PipelineError {
    /// Bad flags, configuration or missing inputs.
    #[error("{0}")]
    Usage(String),
    /// Input data that cannot be processed.
    #[error("{0}")]
    Data(String),
    /// A computation that produced unusable numbers.
    #[error("{0}")]
    Numerical(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) => 1,
            PipelineError::Data(_) => 2,
            PipelineError::Numerical(_) => 3,
        }
    }

    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        PipelineError::Data(format!("{}: {e}", path.display()))
    }
}

impl From<CorpusError> for PipelineError {
    fn from(e: CorpusError) -> Self {
        PipelineError::Data(e.to_string())
    }
}

impl From<ModelError> for PipelineError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NonFiniteInput | ModelError::LdaNonConvergence(_) | ModelError::NonConvergence(_) => {
                PipelineError::Numerical(e.to_string())
            }
            ModelError::InvalidHyperparams(_) | ModelError::NonPositiveAlpha => PipelineError::Usage(e.to_string()),
            _ => PipelineError::Data(e.to_string()),
        }
    }
}

impl From<TaxonomyError> for PipelineError {
    fn from(e: TaxonomyError) -> Self {
        match e {
            TaxonomyError::InvalidMass(_) => PipelineError::Usage(e.to_string()),
            _ => PipelineError::Data(e.to_string()),
        }
    }
}

impl From<TrendError> for PipelineError {
    fn from(e: TrendError) -> Self {
        match e {
            TrendError::InvalidDf(_) => PipelineError::Numerical(e.to_string()),
            _ => PipelineError::Data(e.to_string()),
        }
    }
}

impl From<SelectionError> for PipelineError {
    fn from(e: SelectionError) -> Self {
        match e {
            SelectionError::InvalidGrid(_) => PipelineError::Usage(e.to_string()),
            _ => PipelineError::Data(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Ingest,
    Train,
    Grid,
    Assign,
    Report,
    /// Regression on a `(year, ratio)` CSV; defaults to the report's series.
    Trend { input: Option<PathBuf> },
}

/// Validates the configuration, claims the output directory and runs one
/// command on a pool of `cfg.workers` threads.
pub fn run(command: &Command, cfg: &PipelineConfig) -> Result<(), PipelineError> {
    cfg.validate()?;
    let _lock = OutputLock::acquire(&cfg.paths.output_dir)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.workers {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| PipelineError::Usage(e.to_string()))?;
    pool.install(|| match command {
        Command::Ingest => cmd_ingest(cfg).map(|_| ()),
        Command::Train => cmd_train(cfg).map(|_| ()),
        Command::Grid => cmd_grid(cfg).map(|_| ()),
        Command::Assign => cmd_assign(cfg).map(|_| ()),
        Command::Report => cmd_report(cfg).map(|_| ()),
        Command::Trend { input } => cmd_trend(cfg, input.as_deref()).map(|_| ()),
    })
}
