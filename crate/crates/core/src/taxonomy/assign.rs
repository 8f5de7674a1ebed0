use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TaxonomyError;
use crate::model::FittedModel;

/// Relative tolerance when comparing a prefix sum against the mass target,
/// so summation order cannot add a document.
const MASS_SLACK: f64 = 1e-12;

/// Documents attached to one topic, most strongly associated first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicAssignment {
    pub topic_id: usize,
    pub docs: Vec<(String, f64)>,
    /// Fraction of the topic's total proportion mass that `docs` account for.
    pub mass_covered: f64,
}

impl TopicAssignment {
    pub fn contains(&self, doc_id: &str) -> bool {
        self.docs.iter().any(|(id, _)| id == doc_id)
    }
}

fn assign_column(ids: &[&str], column: &[f64], topic_id: usize, mass: f64) -> TopicAssignment {
    let mut order: Vec<usize> = (0..column.len()).collect();
    order.sort_by(|&a, &b| column[b].total_cmp(&column[a]).then_with(|| ids[a].cmp(ids[b])));
    let total: f64 = column.iter().sum();
    let target = mass * total * (1.0 - MASS_SLACK);

    let mut docs = Vec::new();
    let mut covered = 0.0;
    if total > 0.0 {
        for i in order {
            docs.push((ids[i].to_string(), column[i]));
            covered += column[i];
            if covered >= target {
                break;
            }
        }
    }
    TopicAssignment {
        topic_id,
        docs,
        mass_covered: if total > 0.0 { covered / total } else { 0.0 },
    }
}

/// Attaches to `topic_id` the shortest run of documents, sorted by their
/// proportion of the topic (ties by document id), whose proportions add up
/// to `mass` of the topic's total over all documents.
pub fn assign_documents(model: &FittedModel, topic_id: usize, mass: f64) -> Result<TopicAssignment, TaxonomyError> {
    if !(mass > 0.0 && mass <= 1.0) {
        return Err(TaxonomyError::InvalidMass(mass));
    }
    if topic_id >= model.num_topics() {
        return Err(TaxonomyError::UnknownTopic(topic_id));
    }
    let ids: Vec<&str> = model.docs.iter().map(|d| d.id.as_str()).collect();
    let column: Vec<f64> = model.docs.iter().map(|d| d.theta[topic_id]).collect();
    Ok(assign_column(&ids, &column, topic_id, mass))
}

/// [`assign_documents`] for every topic.
pub fn assign_all(model: &FittedModel, mass: f64) -> Result<Vec<TopicAssignment>, TaxonomyError> {
    (0..model.num_topics())
        .into_par_iter()
        .map(|k| assign_documents(model, k, mass))
        .collect()
}

/// Topics with no documents attached.
pub fn empty_topics(assignments: &[TopicAssignment]) -> Vec<usize> {
    assignments
        .iter()
        .filter(|a| a.docs.is_empty())
        .map(|a| a.topic_id)
        .collect()
}

/// Documents of the model attached to no topic, in model order.
pub fn unassigned_documents(model: &FittedModel, assignments: &[TopicAssignment]) -> Vec<String> {
    let assigned: BTreeSet<&str> = assignments
        .iter()
        .flat_map(|a| a.docs.iter().map(|(id, _)| id.as_str()))
        .collect();
    model
        .docs
        .iter()
        .filter(|d| !assigned.contains(d.id.as_str()))
        .map(|d| d.id.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("d{i:03}")).collect()
    }

    #[test]
    fn first_document_covers_half() {
        let names = ids(3);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let a = assign_column(&refs, &[0.3, 0.6, 0.1], 0, 0.5);
        assert_eq!(a.docs, vec![("d001".to_string(), 0.6)]);
        assert!((a.mass_covered - 0.6).abs() < 1e-15);
    }

    #[test]
    fn equal_proportions_take_half_rounded_up() {
        for m in 1..30 {
            let names = ids(m);
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let column = vec![1.0 / 7.0; m];
            let a = assign_column(&refs, &column, 0, 0.5);
            assert_eq!(a.docs.len(), m.div_ceil(2), "m = {m}");
            // ties broken by id
            assert_eq!(a.docs[0].0, "d000");
        }
    }

    proptest! {
        #[test]
        fn minimal_and_covering(column in proptest::collection::vec(0.0f64..1.0, 1..60), mass in 0.05f64..1.0) {
            let names = ids(column.len());
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let a = assign_column(&refs, &column, 0, mass);
            let total: f64 = column.iter().sum();
            prop_assume!(total > 0.0);
            let covered: f64 = a.docs.iter().map(|d| d.1).sum();
            prop_assert!(covered >= mass * total * (1.0 - 1e-9));
            let without_last = covered - a.docs.last().unwrap().1;
            prop_assert!(without_last < mass * total);
            for w in a.docs.windows(2) {
                prop_assert!(w[0].1 >= w[1].1);
            }
        }
    }
}
