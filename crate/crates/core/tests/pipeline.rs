//! Pipeline runs on tiny corpora and grid resumption.

use std::fs;
use std::path::Path;

use diachron::model::Hyperparams;
use diachron::pipeline::{cmd_report, run, Command, PipelineConfig, RunManifest};

fn one_doc_config(root: &Path) -> PipelineConfig {
    let corpus = root.join("corpus");
    fs::create_dir_all(&corpus).unwrap();
    fs::write(corpus.join("solo.txt"), "Verdad y razón, razón y verdad: la verdad.").unwrap();
    fs::write(corpus.join("metadata.json"), r#"{"solo": {"year": 1999, "language": "es"}}"#).unwrap();
    let mut cfg = PipelineConfig::default();
    cfg.paths.corpus_dir = Some(corpus);
    cfg.paths.output_dir = root.join("out");
    cfg.model = Hyperparams {
        num_topics: 2,
        ..Hyperparams::default()
    };
    cfg
}

fn data_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn one_document_gives_single_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = one_doc_config(dir.path());
    for c in [Command::Ingest, Command::Train, Command::Assign] {
        run(&c, &cfg).unwrap();
    }
    let out = dir.path().join("out");
    // the smallest model has two topics; each claims the only document
    assert_eq!(data_rows(&out.join("models/2-0/doc_topics.csv")), 1);
    assert_eq!(data_rows(&out.join("assign/assignments.csv")), 2);
    assert_eq!(data_rows(&out.join("assign/unassigned.csv")), 0);
    let topics = fs::read_to_string(out.join("assign/topics.csv")).unwrap();
    assert_eq!(topics.lines().skip(1).collect::<Vec<_>>(), ["0,1,1", "1,1,1"]);
    assert_eq!(data_rows(&out.join("ingest/recognition.csv")), 1);

    // without tags every topic is Other, and a one-year series has no trend
    let report = cmd_report(&cfg).unwrap();
    assert!(report.trend.is_none());
    assert!(report.warnings.iter().any(|w| w.contains("no tags")));
    let totals = fs::read_to_string(out.join("reports/area_totals.csv")).unwrap();
    assert!(totals.contains("Other,Other,1"));
}

#[test]
fn grid_cells_are_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = {
        let mut c = PipelineConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/config.toml")).unwrap();
        c.paths.output_dir = dir.path().to_path_buf();
        c.grid.k_values = vec![2, 3];
        c.grid.seeds = vec![4];
        c
    };
    run(&Command::Ingest, &cfg).unwrap();
    run(&Command::Grid, &cfg).unwrap();
    let first = fs::read(dir.path().join("grid/metrics.csv")).unwrap();
    let cell = dir.path().join("grid/cells/3-4/cell.json");
    let stamp = fs::metadata(&cell).unwrap().modified().unwrap();

    run(&Command::Grid, &cfg).unwrap();
    assert_eq!(fs::read(dir.path().join("grid/metrics.csv")).unwrap(), first);
    assert_eq!(fs::metadata(&cell).unwrap().modified().unwrap(), stamp);
    assert_eq!(RunManifest::load(&dir.path().join("grid")).unwrap().runs.len(), 2);

    // a changed setting invalidates the cache
    let mut changed = cfg.clone();
    changed.model.sigma2 = 0.02;
    run(&Command::Grid, &changed).unwrap();
    assert_ne!(fs::metadata(&cell).unwrap().modified().unwrap(), stamp);
}
