//! Attaches documents to topics by the 50% proportion-mass rule and rolls
//! the assignments up into main areas per year with the sample tags.
//!
//! ```bash
//! cargo run --release --example topic_assignment
//! ```

mod common;

use std::collections::BTreeMap;

use diachron::model::{fit_dtm, FittedModel, Hyperparams};
use diachron::taxonomy::{area_counts_by_year, assign_all, load_tags, unassigned_documents, MainArea};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = common::sample_corpus(4)?;
    let hyper = Hyperparams {
        num_topics: 5,
        seed: 1,
        max_iters: 40,
        ..Hyperparams::default()
    };
    let model = FittedModel::accept(fit_dtm(&corpus, &hyper))?;
    let tags = load_tags(&common::data_dir().join("tags.csv"), model.num_topics())?;

    let assignments = assign_all(&model, 0.5)?;
    for a in &assignments {
        let first: Vec<&str> = a.docs.iter().take(4).map(|(id, _)| id.as_str()).collect();
        println!(
            "topic {} [{}]: {} docs cover {:.3} of its mass, top {}",
            a.topic_id,
            tags.tags[a.topic_id].main_area.label(),
            a.docs.len(),
            a.mass_covered,
            first.join(", ")
        );
    }
    println!("{} documents belong to no topic", unassigned_documents(&model, &assignments).len());

    let years: BTreeMap<String, i32> = model.docs.iter().map(|d| (d.id.clone(), d.year)).collect();
    let counts = area_counts_by_year(&assignments, &tags.tags, &years)?;
    println!("\nyear  total  value  history");
    for (i, year) in counts.years.iter().enumerate() {
        println!(
            "{year}  {:>5}  {:>5}  {:>7}",
            counts.totals[i],
            counts.counts[&MainArea::ValueTheory][i],
            counts.counts[&MainArea::HistoryWesternPhil][i]
        );
    }
    Ok(())
}
