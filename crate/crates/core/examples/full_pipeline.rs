//! Every pipeline stage, driven from the sample configuration exactly as the
//! command-line tool would run them. Output goes to `examples/data/out`.
//!
//! ```bash
//! cargo run --release --example full_pipeline
//! ```

use std::path::Path;

use diachron::pipeline::{run, Command, PipelineConfig, RunManifest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PipelineConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/config.toml"))?;
    for command in [
        Command::Ingest,
        Command::Train,
        Command::Grid,
        Command::Assign,
        Command::Report,
        Command::Trend { input: None },
    ] {
        run(&command, &cfg)?;
        println!("{command:?} done");
    }

    let out = &cfg.paths.output_dir;
    let report = std::fs::read_to_string(out.join("ingest/summary.csv"))?;
    println!("\n{report}");
    let manifest = RunManifest::load(&out.join("reports"))?;
    if let Some(last) = manifest.runs.last() {
        println!("report run wrote {} files", last.outputs.len());
    }
    Ok(())
}
