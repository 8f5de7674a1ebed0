//! Sweeps the number of topics on the sample corpus, scores every fit on
//! coherence, held-out perplexity, empty topics and unassigned documents,
//! and ranks the results.
//!
//! ```bash
//! cargo run --release --example model_selection
//! ```

mod common;

use diachron::model::Hyperparams;
use diachron::selection::{rank_models, run_grid, write_ranking_csv, GridSpec, RankWeights};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = common::sample_corpus(4)?;
    let grid = GridSpec {
        k_values: vec![3, 4, 5, 6],
        seeds: vec![1, 2],
        ..GridSpec::default()
    };
    let base = Hyperparams {
        max_iters: 40,
        ..Hyperparams::default()
    };
    let rows = run_grid(&corpus, &grid, &base, 4, &())?;
    let ranking = rank_models(&rows, &RankWeights::default())?;
    write_ranking_csv(&ranking, std::io::stdout().lock())?;
    Ok(())
}
