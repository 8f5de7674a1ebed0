//! Command-line front end. All work happens in `diachron::pipeline`; this
//! file only merges flags into the configuration.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use diachron::pipeline::{run, Command, PipelineConfig, PipelineError};

#[derive(Parser, Debug)]
#[command(name = "diachron", version, about = "Diachronic topic analysis of a dated document collection")]
struct Cli {
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides paths.output_dir)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Model seed (overrides model.seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Clean the raw documents and build the time-sliced corpus
    Ingest {
        /// Corpus directory with metadata.json
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        bin_years: Option<i32>,
    },
    /// Fit one dynamic topic model
    Train {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Sweep the number of topics and seeds, then rank the fits
    Grid {
        #[arg(long, value_delimiter = ',')]
        k_values: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        heldout: Option<f64>,
    },
    /// Attach documents to topics by proportion mass
    Assign {
        #[arg(long)]
        mass: Option<f64>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Write the tables and figure series for a fitted model
    Report {
        #[arg(long)]
        tags: Option<PathBuf>,
        #[arg(long)]
        from_year: Option<i32>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Regress a yearly ratio series on the year
    Trend {
        /// CSV with `year` and `ratio` columns
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        from_year: Option<i32>,
    },
}

fn configure(cli: Cli) -> Result<(Command, PipelineConfig), PipelineError> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(out) = cli.output {
        cfg.paths.output_dir = out;
    }
    if let Some(seed) = cli.seed {
        cfg.model.seed = seed;
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    let command = match cli.command {
        Sub::Ingest { input, bin_years } => {
            cfg.paths.corpus_dir = input.or(cfg.paths.corpus_dir);
            cfg.ingest.bin_years = bin_years.unwrap_or(cfg.ingest.bin_years);
            Command::Ingest
        }
        Sub::Train { k, max_iters } => {
            cfg.model.num_topics = k.unwrap_or(cfg.model.num_topics);
            cfg.model.max_iters = max_iters.unwrap_or(cfg.model.max_iters);
            Command::Train
        }
        Sub::Grid {
            k_values,
            seeds,
            heldout,
        } => {
            cfg.grid.k_values = k_values.unwrap_or(cfg.grid.k_values);
            cfg.grid.seeds = seeds.unwrap_or(cfg.grid.seeds);
            cfg.grid.heldout_fraction = heldout.unwrap_or(cfg.grid.heldout_fraction);
            Command::Grid
        }
        Sub::Assign { mass, model, k } => {
            cfg.analysis.assignment_mass = mass.unwrap_or(cfg.analysis.assignment_mass);
            cfg.paths.model_dir = model.or(cfg.paths.model_dir);
            cfg.model.num_topics = k.unwrap_or(cfg.model.num_topics);
            Command::Assign
        }
        Sub::Report {
            tags,
            from_year,
            model,
            k,
        } => {
            cfg.paths.tags = tags.or(cfg.paths.tags);
            cfg.analysis.from_year = from_year.or(cfg.analysis.from_year);
            cfg.paths.model_dir = model.or(cfg.paths.model_dir);
            cfg.model.num_topics = k.unwrap_or(cfg.model.num_topics);
            Command::Report
        }
        Sub::Trend { input, from_year } => {
            cfg.analysis.from_year = from_year.or(cfg.analysis.from_year);
            Command::Trend { input }
        }
    };
    Ok((command, cfg))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = configure(cli).and_then(|(command, cfg)| run(&command, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
