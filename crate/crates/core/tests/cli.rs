//! The command-line tool: exit codes, flag precedence, the output lock, and
//! agreement with direct library calls.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use diachron::model::{fit_dtm, FittedModel};
use diachron::pipeline::{PipelineConfig, RunManifest};
use diachron::corpus::TimeSlicedCorpus;
use diachron::taxonomy::assign_all;
use diachron::trend::ols_fit;

fn config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/config.toml")
}

fn diachron(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diachron"))
        .arg("--config")
        .arg(config_path())
        .arg("--output")
        .arg(out)
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn usage_errors_exit_1() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(code(&diachron(out.path(), &["frobnicate"])), 1);
    assert_eq!(code(&diachron(out.path(), &["train", "--k", "many"])), 1);
    // nothing ingested yet
    assert_eq!(code(&diachron(out.path(), &["train"])), 1);
    assert_eq!(code(&diachron(out.path(), &["assign", "--mass", "1.5"])), 1);
    let o = Command::new(env!("CARGO_BIN_EXE_diachron")).arg("--help").output().unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn data_errors_exit_2() {
    let out = tempfile::tempdir().unwrap();
    let corpus = tempfile::tempdir().unwrap();
    fs::write(corpus.path().join("a.txt"), "texto").unwrap();
    fs::write(corpus.path().join("metadata.json"), "{ not json").unwrap();
    let o = diachron(out.path(), &["ingest", "--input", corpus.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    // a failed ingest leaves no outputs behind
    assert!(!out.path().join("ingest/corpus.json").exists());

    fs::write(out.path().join(".diachron.lock"), "1").unwrap();
    let o = diachron(out.path(), &["ingest"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("in use"));
}

#[test]
fn cli_outputs_equal_library_results() {
    let out = tempfile::tempdir().unwrap();
    for step in [
        vec!["ingest"],
        vec!["train", "--k", "5"],
        vec!["assign", "--k", "5", "--mass", "0.3"],
        vec!["report", "--k", "5", "--from-year", "2005"],
        vec!["trend"],
    ] {
        let o = diachron(out.path(), &step);
        assert_eq!(code(&o), 0, "{step:?}: {}", String::from_utf8_lossy(&o.stderr));
    }

    let mut cfg = PipelineConfig::load(&config_path()).unwrap();
    cfg.model.num_topics = 5;
    let corpus = TimeSlicedCorpus::load(&out.path().join("ingest/corpus.json")).unwrap();
    let direct = FittedModel::accept(fit_dtm(&corpus, &cfg.model)).unwrap();
    let (saved, _) = FittedModel::load(&out.path().join("models/5-1")).unwrap();
    assert_eq!(saved, direct);

    let assignments = assign_all(&direct, 0.3).unwrap();
    let csv = fs::read_to_string(out.path().join("assign/topics.csv")).unwrap();
    for (line, a) in csv.lines().skip(1).zip(&assignments) {
        assert_eq!(line, format!("{},{},{}", a.topic_id, a.docs.len(), a.mass_covered));
    }

    // the trend command re-fits the report's series and must agree with it
    let series = fs::read_to_string(out.path().join("reports/historical_trend.csv")).unwrap();
    let (x, y): (Vec<f64>, Vec<f64>) = series
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse::<f64>().unwrap(), f[1].parse::<f64>().unwrap())
        })
        .unzip();
    assert_eq!(x.first(), Some(&2005.0));
    let fit = ols_fit(&x, &y).unwrap();
    let trend: serde_json::Value =
        serde_json::from_slice(&fs::read(out.path().join("trend/trend.json")).unwrap()).unwrap();
    assert_eq!(trend["p_one_sided_less"].as_f64().unwrap(), fit.p_one_sided_less);

    let manifest = RunManifest::load(&out.path().join("models/5-1")).unwrap();
    assert_eq!(manifest.runs.len(), 1);
    assert_eq!(manifest.runs[0].seed, Some(1));
    let corpus_hash = diachron::pipeline::sha256_file(&out.path().join("ingest/corpus.json")).unwrap();
    assert!(manifest.runs[0].inputs.values().any(|h| *h == corpus_hash));
}

#[test]
fn seed_flag_overrides_config() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(code(&diachron(out.path(), &["ingest"])), 0);
    assert_eq!(code(&diachron(out.path(), &["--seed", "9", "train", "--k", "3", "--max-iters", "5"])), 0);
    let (model, _) = FittedModel::load(&out.path().join("models/3-9")).unwrap();
    assert_eq!(model.hyper.seed, 9);
    assert_eq!(model.hyper.max_iters, 5);
}
