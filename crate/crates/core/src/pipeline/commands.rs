use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::manifest::{sha256_file, write_atomic, write_json, RunRecorder};
use super::report::{period_summary, write_table, IngestReport};
use super::PipelineError;
use crate::corpus::{
    build_time_slices, load_documents, CorpusError, DictionaryBundle, PreprocessOptions, Preprocessor,
    TimeSlicedCorpus,
};
use crate::model::{fit_dtm, top_words, FittedModel, Hyperparams, ModelError, COHERENCE_VARIANT};
use crate::selection::{rank_models, run_grid, CellStatus, GridCellMetrics, GridObserver, GridSpec, RankedReport};
use crate::taxonomy::{
    area_counts_by_year, area_word_profile, assign_all, empty_topics, historical_ratio_series,
    historical_topic_table, largest_subarea_series, load_tags, subarea_table, unassigned_documents, MainArea,
    TagSet, TaxonomyError, TopicAssignment,
};
use crate::trend::{ols_fit, TrendResult};

const CORPUS_FILE: &str = "corpus.json";

fn stage_dir(cfg: &PipelineConfig, name: &str) -> PathBuf {
    cfg.paths.output_dir.join(name)
}

fn corpus_path(cfg: &PipelineConfig) -> PathBuf {
    stage_dir(cfg, "ingest").join(CORPUS_FILE)
}

fn load_corpus(cfg: &PipelineConfig) -> Result<(TimeSlicedCorpus, PathBuf), PipelineError> {
    let path = corpus_path(cfg);
    if !path.exists() {
        return Err(PipelineError::Usage(format!(
            "{} not found; run `ingest` first",
            path.display()
        )));
    }
    Ok((TimeSlicedCorpus::load(&path)?, path))
}

fn load_model(cfg: &PipelineConfig) -> Result<(FittedModel, PathBuf), PipelineError> {
    let dir = cfg.model_dir();
    if !dir.exists() {
        return Err(PipelineError::Usage(format!(
            "model {} not found; run `train` first or set paths.model_dir",
            dir.display()
        )));
    }
    let (model, _) = FittedModel::load(&dir)?;
    Ok((model, dir))
}

fn num(x: f64) -> String {
    x.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestOutcome {
    pub dir: PathBuf,
    pub report: IngestReport,
}

/// Loads, cleans and slices the raw corpus.
pub fn cmd_ingest(cfg: &PipelineConfig) -> Result<IngestOutcome, PipelineError> {
    let corpus_dir = PipelineConfig::existing(&cfg.paths.corpus_dir, "corpus directory")?
        .ok_or_else(|| PipelineError::Usage("paths.corpus_dir is required for ingest".into()))?;
    let mut rec = RunRecorder::new("ingest", None, cfg);
    rec.input(&corpus_dir)?;
    let p = &cfg.paths;
    let frequency = PipelineConfig::existing(&p.frequency_dict, "frequency dictionary")?;
    let custom = PipelineConfig::existing(&p.custom_dict, "custom dictionary")?;
    let lemmas = PipelineConfig::existing(&p.lemma_dict, "lemma table")?;
    let stopwords = PipelineConfig::existing(&p.stopwords, "stopword list")?;
    let protected = PipelineConfig::existing(&p.protected, "protected word list")?;
    for path in [&frequency, &custom, &lemmas, &stopwords, &protected].into_iter().flatten() {
        rec.input(path)?;
    }

    let ing = &cfg.ingest;
    let mut raw = load_documents(&corpus_dir, (ing.min_year, ing.max_year))?;
    if !ing.languages.is_empty() {
        raw.retain(|d| ing.languages.contains(&d.language));
    }
    if raw.is_empty() {
        return Err(CorpusError::EmptyCorpus.into());
    }
    rec.stage("load");

    let dicts = DictionaryBundle::from_files(
        frequency.as_deref(),
        custom.as_deref(),
        lemmas.as_deref(),
        stopwords.as_deref(),
        protected.as_deref(),
    )?;
    let correct = ing.correct && frequency.is_some();
    if ing.correct && !correct {
        rec.warn("no frequency dictionary given; orthographic correction skipped".into());
    }
    let preprocessor = Preprocessor::new(
        dicts,
        PreprocessOptions {
            min_token_len: ing.min_token_len,
            max_edit_distance: ing.max_edit_distance,
            correct,
        },
    )?;
    let processed = preprocessor.process_all(&raw);
    rec.stage("preprocess");
    let (clean, reports): (Vec<_>, Vec<_>) = processed.into_iter().unzip();
    let corpus = build_time_slices(&clean, ing.bin_years, ing.min_df)?;
    rec.stage("slice");
    let report = IngestReport::build(&preprocessor, &raw, &reports, &corpus);
    for id in &report.empty_documents {
        rec.warn(format!("document {id} is empty after cleaning"));
    }

    let dir = stage_dir(cfg, "ingest");
    let archive = serde_json::to_vec(&corpus).map_err(|e| PipelineError::Data(e.to_string()))?;
    write_atomic(&dir.join(CORPUS_FILE), &archive)?;
    write_json(&dir.join("report.json"), &report)?;
    let table: Vec<Vec<String>> = report
        .table_rows()
        .into_iter()
        .map(|(k, v)| vec![k.to_string(), v])
        .collect();
    let mut outputs = write_table(&dir, "summary", &["field", "count"], &table, &report)?;
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.id.clone(),
                r.year.to_string(),
                r.word_count.to_string(),
                num(r.recognized_before),
                num(r.recognized_after),
                r.corrected_count.to_string(),
                r.clean_length.to_string(),
            ]
        })
        .collect();
    outputs.extend(write_table(
        &dir,
        "recognition",
        &[
            "doc_id",
            "year",
            "word_count",
            "recognized_before",
            "recognized_after",
            "corrected_count",
            "clean_length",
        ],
        &rows,
        &reports,
    )?);
    rec.stage("write");
    for f in [dir.join(CORPUS_FILE), dir.join("report.json")].iter().chain(&outputs) {
        rec.output(f)?;
    }
    rec.finish(&dir)?;
    Ok(IngestOutcome { dir, report })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub dir: PathBuf,
    pub converged: bool,
    pub model: FittedModel,
}

fn write_model_tables(dir: &Path, model: &FittedModel, top_n: usize) -> Result<Vec<PathBuf>, PipelineError> {
    let k = model.num_topics();
    let mut header = vec!["doc_id".to_string(), "year".to_string(), "slice".to_string()];
    header.extend((0..k).map(|i| format!("theta_{i}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = model
        .docs
        .iter()
        .map(|d| {
            let mut r = vec![d.id.clone(), d.year.to_string(), model.slice_labels[d.slice].clone()];
            r.extend(d.theta.iter().map(|x| num(*x)));
            r
        })
        .collect();
    let mut out = write_table(dir, "doc_topics", &header_refs, &rows, &model.docs)?;

    let tops = top_words(model, top_n);
    let mut rows = Vec::new();
    let mut sidecar: Vec<Vec<(String, f64)>> = Vec::new();
    for (topic, words) in tops.iter().enumerate() {
        let avg = model.chains[topic].time_averaged();
        let mut listed = Vec::new();
        for (rank, &w) in words.iter().enumerate() {
            let token = model.vocabulary.token(w).to_string();
            rows.push(vec![topic.to_string(), (rank + 1).to_string(), token.clone(), num(avg[w as usize])]);
            listed.push((token, avg[w as usize]));
        }
        sidecar.push(listed);
    }
    out.extend(write_table(dir, "topic_words", &["topic_id", "rank", "word", "probability"], &rows, &sidecar)?);
    Ok(out)
}

/// Fits one dynamic topic model on the ingested corpus. A fit that stops at
/// the iteration limit is kept, with a warning.
pub fn cmd_train(cfg: &PipelineConfig) -> Result<TrainOutcome, PipelineError> {
    let (corpus, path) = load_corpus(cfg)?;
    let mut rec = RunRecorder::new("train", Some(cfg.model.seed), cfg);
    rec.input(&path)?;
    let hash = sha256_file(&path)?;
    rec.stage("load");
    let (model, converged) = match fit_dtm(&corpus, &cfg.model) {
        Ok(m) => (m, true),
        Err(ModelError::NonConvergence(m)) => {
            rec.warn(format!(
                "model did not converge within {} iterations; keeping the last estimate",
                m.train_log.iterations
            ));
            (*m, false)
        }
        Err(e) => return Err(e.into()),
    };
    rec.stage("fit");
    let dir = cfg.model_dir();
    model.save(&dir, &hash)?;
    let outputs = write_model_tables(&dir, &model, cfg.analysis.top_words)?;
    rec.stage("write");
    for f in [dir.join("model.json"), dir.join("beta.bin")].iter().chain(&outputs) {
        rec.output(f)?;
    }
    rec.finish(&dir)?;
    Ok(TrainOutcome { dir, converged, model })
}

#[derive(Serialize, Deserialize)]
struct CellRecord {
    corpus_hash: String,
    hyper: Hyperparams,
    grid: GridSpec,
    metrics: GridCellMetrics,
}

struct CellStore {
    dir: PathBuf,
    corpus_hash: String,
    hyper: Hyperparams,
    grid: GridSpec,
}

impl CellStore {
    fn cell_dir(&self, k: usize, seed: u64) -> PathBuf {
        self.dir.join(format!("{k}-{seed}"))
    }

    fn hyper_for(&self, k: usize, seed: u64) -> Hyperparams {
        Hyperparams {
            num_topics: k,
            seed,
            ..self.hyper.clone()
        }
    }
}

impl GridObserver for CellStore {
    fn cached(&self, k: usize, seed: u64) -> Option<GridCellMetrics> {
        let text = fs::read(self.cell_dir(k, seed).join("cell.json")).ok()?;
        let rec: CellRecord = serde_json::from_slice(&text).ok()?;
        let same = rec.corpus_hash == self.corpus_hash && rec.hyper == self.hyper_for(k, seed) && rec.grid == self.grid;
        (same && !matches!(rec.metrics.status, CellStatus::Failed(_))).then_some(rec.metrics)
    }

    fn finished(&self, metrics: &GridCellMetrics, model: Option<&FittedModel>) {
        let dir = self.cell_dir(metrics.k, metrics.seed);
        let result = (|| -> Result<(), PipelineError> {
            if let Some(m) = model {
                m.save(&dir, &self.corpus_hash)?;
            }
            write_json(
                &dir.join("cell.json"),
                &CellRecord {
                    corpus_hash: self.corpus_hash.clone(),
                    hyper: self.hyper_for(metrics.k, metrics.seed),
                    grid: self.grid.clone(),
                    metrics: metrics.clone(),
                },
            )
        })();
        if let Err(e) = result {
            log::warn!("could not store grid cell {}: {e}", dir.display());
        }
    }
}

#[derive(Serialize)]
struct GridReport<'a> {
    grid: &'a GridSpec,
    hyper_base: &'a Hyperparams,
    coherence_variant: &'a str,
    rows: &'a [GridCellMetrics],
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOutcome {
    pub dir: PathBuf,
    pub rows: Vec<GridCellMetrics>,
    pub ranking: RankedReport,
}

/// Runs the `(K, seed)` sweep. Cells finished by an earlier run with the
/// same corpus and settings are reused.
pub fn cmd_grid(cfg: &PipelineConfig) -> Result<GridOutcome, PipelineError> {
    let (corpus, path) = load_corpus(cfg)?;
    let mut rec = RunRecorder::new("grid", Some(cfg.model.seed), cfg);
    rec.input(&path)?;
    let dir = stage_dir(cfg, "grid");
    let store = CellStore {
        dir: dir.join("cells"),
        corpus_hash: sha256_file(&path)?,
        hyper: cfg.model.clone(),
        grid: cfg.grid.clone(),
    };
    let workers = cfg.workers.unwrap_or_else(rayon::current_num_threads);
    let rows = run_grid(&corpus, &cfg.grid, &cfg.model, workers, &store)?;
    rec.stage("fit");
    for r in &rows {
        match &r.status {
            CellStatus::Failed(m) => rec.warn(format!("cell K={} seed={} failed: {m}", r.k, r.seed)),
            CellStatus::NotConverged => rec.warn(format!("cell K={} seed={} did not converge", r.k, r.seed)),
            CellStatus::Converged => {}
        }
    }
    let ranking = rank_models(&rows, &cfg.rank)?;

    let mut buf = Vec::new();
    crate::selection::write_grid_csv(&rows, &mut buf)?;
    write_atomic(&dir.join("metrics.csv"), &buf)?;
    write_json(
        &dir.join("metrics.json"),
        &GridReport {
            grid: &cfg.grid,
            hyper_base: &cfg.model,
            coherence_variant: COHERENCE_VARIANT,
            rows: &rows,
        },
    )?;
    let mut buf = Vec::new();
    crate::selection::write_ranking_csv(&ranking, &mut buf)?;
    write_atomic(&dir.join("ranking.csv"), &buf)?;
    write_json(&dir.join("ranking.json"), &ranking)?;
    rec.stage("write");
    for f in ["metrics.csv", "metrics.json", "ranking.csv", "ranking.json"] {
        rec.output(&dir.join(f))?;
    }
    rec.finish(&dir)?;
    Ok(GridOutcome { dir, rows, ranking })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignOutcome {
    pub dir: PathBuf,
    pub assignments: Vec<TopicAssignment>,
    pub unassigned: Vec<String>,
}

/// Attaches documents to topics by the proportion-mass rule.
pub fn cmd_assign(cfg: &PipelineConfig) -> Result<AssignOutcome, PipelineError> {
    let (model, model_dir) = load_model(cfg)?;
    let mut rec = RunRecorder::new("assign", Some(model.hyper.seed), cfg);
    rec.input(&model_dir)?;
    let assignments = assign_all(&model, cfg.analysis.assignment_mass)?;
    let unassigned = unassigned_documents(&model, &assignments);
    let empty = empty_topics(&assignments);
    rec.stage("assign");

    let dir = stage_dir(cfg, "assign");
    let rows: Vec<Vec<String>> = assignments
        .iter()
        .flat_map(|a| {
            a.docs.iter().enumerate().map(move |(rank, (id, p))| {
                vec![a.topic_id.to_string(), (rank + 1).to_string(), id.clone(), num(*p)]
            })
        })
        .collect();
    let mut outputs = write_table(&dir, "assignments", &["topic_id", "rank", "doc_id", "proportion"], &rows, &assignments)?;
    let rows: Vec<Vec<String>> = assignments
        .iter()
        .map(|a| vec![a.topic_id.to_string(), a.docs.len().to_string(), num(a.mass_covered)])
        .collect();
    #[derive(Serialize)]
    struct TopicSummary<'a> {
        mass: f64,
        empty_topics: &'a [usize],
        unassigned_docs: &'a [String],
    }
    let summary = TopicSummary {
        mass: cfg.analysis.assignment_mass,
        empty_topics: &empty,
        unassigned_docs: &unassigned,
    };
    outputs.extend(write_table(&dir, "topics", &["topic_id", "num_docs", "mass_covered"], &rows, &summary)?);
    let rows: Vec<Vec<String>> = unassigned.iter().map(|id| vec![id.clone()]).collect();
    outputs.extend(write_table(&dir, "unassigned", &["doc_id"], &rows, &unassigned)?);
    rec.stage("write");
    for f in &outputs {
        rec.output(f)?;
    }
    rec.finish(&dir)?;
    Ok(AssignOutcome {
        dir,
        assignments,
        unassigned,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendOutcome {
    pub dir: PathBuf,
    pub result: TrendResult,
}

#[derive(Serialize)]
struct TrendFile<'a> {
    from_year: Option<i32>,
    years: &'a [i32],
    ratios: &'a [f64],
    #[serde(flatten)]
    result: &'a TrendResult,
}

fn write_trend(
    dir: &Path,
    stem: &str,
    from_year: Option<i32>,
    years: &[i32],
    ratios: &[f64],
) -> Result<(TrendResult, Vec<PathBuf>), PipelineError> {
    let x: Vec<f64> = years.iter().map(|&y| f64::from(y)).collect();
    let result = ols_fit(&x, ratios)?;
    let rows: Vec<Vec<String>> = (0..years.len())
        .map(|i| {
            vec![
                years[i].to_string(),
                num(ratios[i]),
                num(result.fitted[i]),
                num(result.ci_band[i].0),
                num(result.ci_band[i].1),
            ]
        })
        .collect();
    let sidecar = TrendFile {
        from_year,
        years,
        ratios,
        result: &result,
    };
    let files = write_table(dir, stem, &["year", "ratio", "fitted", "lower", "upper"], &rows, &sidecar)?;
    Ok((result, files))
}

/// Regression of a yearly ratio series read from a CSV with `year` and
/// `ratio` columns (by default the historical series of the last report).
pub fn cmd_trend(cfg: &PipelineConfig, input: Option<&Path>) -> Result<TrendOutcome, PipelineError> {
    let input = input.map_or_else(|| stage_dir(cfg, "reports").join("historical_trend.csv"), Path::to_path_buf);
    if !input.exists() {
        return Err(PipelineError::Usage(format!("{} not found", input.display())));
    }
    let mut rec = RunRecorder::new("trend", None, cfg);
    rec.input(&input)?;
    let mut reader = csv::Reader::from_path(&input).map_err(|e| PipelineError::Data(e.to_string()))?;
    let headers = reader.headers().map_err(|e| PipelineError::Data(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| PipelineError::Data(format!("{}: no `{name}` column", input.display())))
    };
    let (yc, rc) = (col("year")?, col("ratio")?);
    let mut years = Vec::new();
    let mut ratios = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| PipelineError::Data(e.to_string()))?;
        let bad = |what: &str| PipelineError::Data(format!("{} row {}: bad {what}", input.display(), i + 2));
        let year: i32 = record.get(yc).unwrap_or("").trim().parse().map_err(|_| bad("year"))?;
        let ratio: f64 = record.get(rc).unwrap_or("").trim().parse().map_err(|_| bad("ratio"))?;
        if cfg.analysis.from_year.is_none_or(|f| year >= f) {
            years.push(year);
            ratios.push(ratio);
        }
    }
    rec.stage("load");
    let dir = stage_dir(cfg, "trend");
    let (result, files) = write_trend(&dir, "band", cfg.analysis.from_year, &years, &ratios)?;
    write_json(&dir.join("trend.json"), &result)?;
    rec.stage("fit");
    for f in files.iter().chain([&dir.join("trend.json")]) {
        rec.output(f)?;
    }
    rec.finish(&dir)?;
    Ok(TrendOutcome { dir, result })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOutcome {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub trend: Option<TrendResult>,
    pub warnings: Vec<String>,
}

/// Writes every table and figure series for a fitted model and its tags.
pub fn cmd_report(cfg: &PipelineConfig) -> Result<ReportOutcome, PipelineError> {
    let (model, model_dir) = load_model(cfg)?;
    let mut rec = RunRecorder::new("report", Some(model.hyper.seed), cfg);
    rec.input(&model_dir)?;
    let k = model.num_topics();
    let tags = match &cfg.paths.tags {
        Some(path) if path.exists() => {
            rec.input(path)?;
            load_tags(path, k)?
        }
        other => {
            if let Some(p) = other {
                rec.warn(format!("tags file {} not found", p.display()));
            }
            rec.warn("no tags; every topic counts as Other".into());
            TagSet::untagged(k)
        }
    };
    for w in &tags.warnings {
        rec.warn(w.clone());
    }
    let tags = &tags.tags;
    let assignments = assign_all(&model, cfg.analysis.assignment_mass)?;
    let docs: BTreeMap<String, i32> = model.docs.iter().map(|d| (d.id.clone(), d.year)).collect();
    rec.stage("assign");

    let dir = stage_dir(cfg, "reports");
    let an = &cfg.analysis;
    let mut files = Vec::new();

    match load_corpus(cfg) {
        Ok((corpus, path)) => {
            rec.input(&path)?;
            let periods = period_summary(&corpus, an.period_years);
            let rows: Vec<Vec<String>> = periods
                .iter()
                .map(|p| {
                    vec![
                        p.start_year.to_string(),
                        p.end_year.to_string(),
                        p.documents.to_string(),
                        num(p.mean_length),
                    ]
                })
                .collect();
            files.extend(write_table(
                &dir,
                "period_counts",
                &["start_year", "end_year", "documents", "mean_length"],
                &rows,
                &periods,
            )?);
        }
        Err(e) => rec.warn(format!("document-count summary skipped: {e}")),
    }

    let areas = area_counts_by_year(&assignments, tags, &docs)?;
    let mut rows = Vec::new();
    for area in MainArea::ALL {
        let ratios = areas.ratios(area);
        for (i, year) in areas.years.iter().enumerate() {
            rows.push(vec![
                year.to_string(),
                area.to_string(),
                areas.counts[&area][i].to_string(),
                areas.totals[i].to_string(),
                num(ratios[i]),
            ]);
        }
    }
    files.extend(write_table(&dir, "area_counts", &["year", "main_area", "count", "total", "ratio"], &rows, &areas)?);
    let rows: Vec<Vec<String>> = MainArea::ALL
        .iter()
        .map(|a| vec![a.to_string(), a.label().to_string(), areas.overall[a].to_string()])
        .collect();
    files.extend(write_table(&dir, "area_totals", &["main_area", "label", "documents"], &rows, &areas.overall)?);

    let subareas = largest_subarea_series(&assignments, tags, &docs)?;
    let mut rows = Vec::new();
    for area in MainArea::ALL {
        let ratios = areas.ratios(area);
        for (i, year) in areas.years.iter().enumerate() {
            rows.push(vec![
                year.to_string(),
                area.to_string(),
                "area".into(),
                area.label().to_string(),
                areas.counts[&area][i].to_string(),
                areas.totals[i].to_string(),
                num(ratios[i]),
            ]);
        }
        if let Some(s) = subareas.iter().find(|s| s.main_area == area) {
            for (i, year) in s.years.iter().enumerate() {
                rows.push(vec![
                    year.to_string(),
                    area.to_string(),
                    "subarea".into(),
                    s.subarea.clone(),
                    s.counts[i].to_string(),
                    areas.totals[i].to_string(),
                    num(s.ratios[i]),
                ]);
            }
        }
    }
    files.extend(write_table(
        &dir,
        "area_subarea_ratios",
        &["year", "main_area", "level", "name", "count", "total", "ratio"],
        &rows,
        &subareas,
    )?);

    let mut rows = Vec::new();
    let mut profiles: BTreeMap<MainArea, Vec<(String, f64)>> = BTreeMap::new();
    for area in MainArea::ALL {
        match area_word_profile(&model, tags, area, an.top_words) {
            Ok(words) => {
                for (rank, (w, p)) in words.iter().enumerate() {
                    rows.push(vec![area.to_string(), (rank + 1).to_string(), w.clone(), num(*p)]);
                }
                profiles.insert(area, words);
            }
            Err(TaxonomyError::NoTopicsInArea(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    files.extend(write_table(&dir, "area_words", &["main_area", "rank", "word", "probability"], &rows, &profiles)?);

    let sub_rows = subarea_table(&model, &assignments, tags, an.subareas_per_area, an.top_words);
    let rows: Vec<Vec<String>> = sub_rows
        .iter()
        .map(|r| vec![r.main_area.to_string(), r.subarea.clone(), r.words.join("; "), r.num_docs.to_string()])
        .collect();
    files.extend(write_table(&dir, "subarea_words", &["main_area", "subarea", "words", "num_docs"], &rows, &sub_rows)?);

    let hist_rows = historical_topic_table(&model, &assignments, tags, an.historical_min_docs, an.top_words);
    let rows: Vec<Vec<String>> = hist_rows
        .iter()
        .map(|r| {
            vec![
                r.main_area.to_string(),
                r.topic_id.to_string(),
                r.subareas.join("; "),
                r.words.join("; "),
                r.num_docs.to_string(),
            ]
        })
        .collect();
    files.extend(write_table(
        &dir,
        "historical_topics",
        &["main_area", "topic_id", "subareas", "words", "num_docs"],
        &rows,
        &hist_rows,
    )?);

    let whole = historical_ratio_series(&assignments, tags, &docs, None)?;
    let series = historical_ratio_series(&assignments, tags, &docs, an.from_year)?;
    #[derive(Serialize)]
    struct Historical<'a> {
        whole_corpus: &'a crate::taxonomy::HistoricalSeries,
        regression_window: &'a crate::taxonomy::HistoricalSeries,
    }
    let rows: Vec<Vec<String>> = (0..whole.years.len())
        .map(|i| {
            vec![
                whole.years[i].to_string(),
                whole.counts[i].to_string(),
                whole.totals[i].to_string(),
                num(whole.ratios[i]),
            ]
        })
        .collect();
    files.extend(write_table(
        &dir,
        "historical_series",
        &["year", "count", "total", "ratio"],
        &rows,
        &Historical {
            whole_corpus: &whole,
            regression_window: &series,
        },
    )?);

    let trend = if series.years.len() >= 3 {
        match write_trend(&dir, "historical_trend", an.from_year, &series.years, &series.ratios) {
            Ok((result, f)) => {
                files.extend(f);
                Some(result)
            }
            Err(e) => {
                rec.warn(format!("historical trend skipped: {e}"));
                None
            }
        }
    } else {
        rec.warn(format!(
            "historical trend skipped: {} year(s) in range, need 3",
            series.years.len()
        ));
        None
    };
    rec.stage("write");
    for f in &files {
        rec.output(f)?;
    }
    let warnings = rec.warnings().to_vec();
    rec.finish(&dir)?;
    Ok(ReportOutcome {
        dir,
        files,
        trend,
        warnings,
    })
}
