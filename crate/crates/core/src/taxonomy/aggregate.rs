use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{MainArea, TaxonomyError, TopicAssignment, TopicTags};
use crate::model::FittedModel;

fn tag_for(tags: &[TopicTags], topic_id: usize) -> Option<&TopicTags> {
    match tags.get(topic_id) {
        Some(t) if t.topic_id == topic_id => Some(t),
        _ => tags.iter().find(|t| t.topic_id == topic_id),
    }
}

fn area_of(tags: &[TopicTags], topic_id: usize) -> MainArea {
    tag_for(tags, topic_id).map_or(MainArea::Other, |t| t.main_area)
}

/// Averages the slice-wise word distributions of `topics` with equal weights
/// and returns the `top_n` most probable words.
fn profile_of(model: &FittedModel, topics: &[usize], top_n: usize) -> Vec<(String, f64)> {
    let v = model.vocabulary.len();
    let mut avg = vec![0.0; v];
    let weight = 1.0 / (topics.len() * model.num_slices()) as f64;
    for &k in topics {
        for t in 0..model.num_slices() {
            for (a, p) in avg.iter_mut().zip(model.chains[k].probabilities(t)) {
                *a += p * weight;
            }
        }
    }
    let mut idx: Vec<usize> = (0..v).collect();
    idx.sort_by(|&a, &b| avg[b].total_cmp(&avg[a]).then(a.cmp(&b)));
    idx.into_iter()
        .take(top_n)
        .map(|i| (model.vocabulary.token(i as u32).to_string(), avg[i]))
        .collect()
}

/// Most probable words of a main area: word distributions of every topic
/// tagged with `area` are averaged over topics and slices.
pub fn area_word_profile(
    model: &FittedModel,
    tags: &[TopicTags],
    area: MainArea,
    top_n: usize,
) -> Result<Vec<(String, f64)>, TaxonomyError> {
    let topics: Vec<usize> = (0..model.num_topics()).filter(|&k| area_of(tags, k) == area).collect();
    if topics.is_empty() {
        return Err(TaxonomyError::NoTopicsInArea(area.label().to_string()));
    }
    Ok(profile_of(model, &topics, top_n))
}

fn subarea_topics(model: &FittedModel, tags: &[TopicTags], area: Option<MainArea>, subarea: &str) -> Vec<usize> {
    (0..model.num_topics())
        .filter(|&k| {
            tag_for(tags, k).is_some_and(|t| {
                area.is_none_or(|a| a == t.main_area) && t.subareas.iter().any(|s| s == subarea)
            })
        })
        .collect()
}

/// Like [`area_word_profile`] for the topics carrying `subarea`, optionally
/// restricted to one main area.
pub fn subarea_word_profile(
    model: &FittedModel,
    tags: &[TopicTags],
    area: Option<MainArea>,
    subarea: &str,
    top_n: usize,
) -> Result<Vec<(String, f64)>, TaxonomyError> {
    let topics = subarea_topics(model, tags, area, subarea);
    if topics.is_empty() {
        return Err(TaxonomyError::NoTopicsInArea(subarea.to_string()));
    }
    Ok(profile_of(model, &topics, top_n))
}

fn check_years(assignments: &[TopicAssignment], docs: &BTreeMap<String, i32>) -> Result<(), TaxonomyError> {
    for a in assignments {
        for (id, _) in &a.docs {
            if !docs.contains_key(id) {
                return Err(TaxonomyError::UnknownDocId(id.clone()));
            }
        }
    }
    Ok(())
}

fn yearly_totals(docs: &BTreeMap<String, i32>) -> BTreeMap<i32, usize> {
    let mut totals = BTreeMap::new();
    for &y in docs.values() {
        *totals.entry(y).or_insert(0) += 1;
    }
    totals
}

fn per_year(set: &BTreeSet<&str>, docs: &BTreeMap<String, i32>, years: &[i32]) -> Vec<usize> {
    let mut by_year: BTreeMap<i32, usize> = BTreeMap::new();
    for id in set {
        *by_year.entry(docs[*id]).or_insert(0) += 1;
    }
    years.iter().map(|y| by_year.get(y).copied().unwrap_or(0)).collect()
}

fn ratios(counts: &[usize], totals: &[usize]) -> Vec<f64> {
    counts
        .iter()
        .zip(totals)
        .map(|(&c, &t)| if t > 0 { c as f64 / t as f64 } else { 0.0 })
        .collect()
}

/// Documents per main area and year. A document counts at most once per
/// area, but may count in several areas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaCounts {
    pub years: Vec<i32>,
    /// All documents published each year.
    pub totals: Vec<usize>,
    pub counts: BTreeMap<MainArea, Vec<usize>>,
    pub overall: BTreeMap<MainArea, usize>,
}

impl AreaCounts {
    pub fn ratios(&self, area: MainArea) -> Vec<f64> {
        ratios(&self.counts[&area], &self.totals)
    }
}

pub fn area_counts_by_year(
    assignments: &[TopicAssignment],
    tags: &[TopicTags],
    docs: &BTreeMap<String, i32>,
) -> Result<AreaCounts, TaxonomyError> {
    check_years(assignments, docs)?;
    let mut members: BTreeMap<MainArea, BTreeSet<&str>> =
        MainArea::ALL.iter().map(|&a| (a, BTreeSet::new())).collect();
    for a in assignments {
        let set = members.get_mut(&area_of(tags, a.topic_id)).expect("all areas present");
        set.extend(a.docs.iter().map(|(id, _)| id.as_str()));
    }
    let totals_by_year = yearly_totals(docs);
    let years: Vec<i32> = totals_by_year.keys().copied().collect();
    Ok(AreaCounts {
        totals: totals_by_year.values().copied().collect(),
        counts: members
            .iter()
            .map(|(&area, set)| (area, per_year(set, docs, &years)))
            .collect(),
        overall: members.iter().map(|(&area, set)| (area, set.len())).collect(),
        years,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubareaRow {
    pub main_area: MainArea,
    pub subarea: String,
    pub num_docs: usize,
    pub words: Vec<String>,
}

fn subarea_members<'a>(
    assignments: &'a [TopicAssignment],
    tags: &[TopicTags],
) -> BTreeMap<(MainArea, String), BTreeSet<&'a str>> {
    let mut members: BTreeMap<(MainArea, String), BTreeSet<&str>> = BTreeMap::new();
    for a in assignments {
        let Some(tag) = tag_for(tags, a.topic_id) else { continue };
        for sub in &tag.subareas {
            members
                .entry((tag.main_area, sub.clone()))
                .or_default()
                .extend(a.docs.iter().map(|(id, _)| id.as_str()));
        }
    }
    members
}

/// The `per_area` subareas with most documents within each main area, each
/// with its document count and most probable words.
pub fn subarea_table(
    model: &FittedModel,
    assignments: &[TopicAssignment],
    tags: &[TopicTags],
    per_area: usize,
    top_n: usize,
) -> Vec<SubareaRow> {
    let members = subarea_members(assignments, tags);
    let mut rows = Vec::new();
    for area in MainArea::ALL {
        let mut subs: Vec<(&String, usize)> = members
            .iter()
            .filter(|((a, _), _)| *a == area)
            .map(|((_, s), set)| (s, set.len()))
            .collect();
        subs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        for (sub, num_docs) in subs.into_iter().take(per_area) {
            let topics = subarea_topics(model, tags, Some(area), sub);
            rows.push(SubareaRow {
                main_area: area,
                subarea: sub.clone(),
                num_docs,
                words: profile_of(model, &topics, top_n).into_iter().map(|(w, _)| w).collect(),
            });
        }
    }
    rows
}

/// Yearly counts and ratios of the subarea with most documents in a main area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubareaSeries {
    pub main_area: MainArea,
    pub subarea: String,
    pub years: Vec<i32>,
    pub counts: Vec<usize>,
    pub ratios: Vec<f64>,
}

pub fn largest_subarea_series(
    assignments: &[TopicAssignment],
    tags: &[TopicTags],
    docs: &BTreeMap<String, i32>,
) -> Result<Vec<SubareaSeries>, TaxonomyError> {
    check_years(assignments, docs)?;
    let members = subarea_members(assignments, tags);
    let totals_by_year = yearly_totals(docs);
    let years: Vec<i32> = totals_by_year.keys().copied().collect();
    let totals: Vec<usize> = totals_by_year.values().copied().collect();
    let mut out = Vec::new();
    for area in MainArea::ALL {
        let largest = members
            .iter()
            .filter(|((a, _), _)| *a == area)
            .max_by(|x, y| x.1.len().cmp(&y.1.len()).then_with(|| y.0 .1.cmp(&x.0 .1)));
        if let Some(((_, sub), set)) = largest {
            let counts = per_year(set, docs, &years);
            out.push(SubareaSeries {
                main_area: area,
                subarea: sub.clone(),
                ratios: ratios(&counts, &totals),
                counts,
                years: years.clone(),
            });
        }
    }
    Ok(out)
}

/// Share of each year's documents attached to at least one historical topic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoricalSeries {
    pub from_year: Option<i32>,
    pub years: Vec<i32>,
    pub counts: Vec<usize>,
    pub totals: Vec<usize>,
    pub ratios: Vec<f64>,
    pub overall_count: usize,
    pub overall_total: usize,
    pub overall_ratio: f64,
}

impl HistoricalSeries {
    pub fn points(&self) -> Vec<(i32, f64)> {
        self.years.iter().copied().zip(self.ratios.iter().copied()).collect()
    }
}

/// Yearly historical ratio for years from `from_year` on (all years if
/// `None`). Years without documents do not appear.
pub fn historical_ratio_series(
    assignments: &[TopicAssignment],
    tags: &[TopicTags],
    docs: &BTreeMap<String, i32>,
    from_year: Option<i32>,
) -> Result<HistoricalSeries, TaxonomyError> {
    check_years(assignments, docs)?;
    let historical: BTreeSet<&str> = assignments
        .iter()
        .filter(|a| tag_for(tags, a.topic_id).is_some_and(|t| t.historical))
        .flat_map(|a| a.docs.iter().map(|(id, _)| id.as_str()))
        .filter(|id| from_year.is_none_or(|y| docs[*id] >= y))
        .collect();
    let in_range: BTreeMap<String, i32> = docs
        .iter()
        .filter(|(_, &y)| from_year.is_none_or(|f| y >= f))
        .map(|(id, &y)| (id.clone(), y))
        .collect();
    let totals_by_year = yearly_totals(&in_range);
    let years: Vec<i32> = totals_by_year.keys().copied().collect();
    let totals: Vec<usize> = totals_by_year.values().copied().collect();
    let counts = per_year(&historical, docs, &years);
    let overall_total = in_range.len();
    Ok(HistoricalSeries {
        from_year,
        ratios: ratios(&counts, &totals),
        overall_count: historical.len(),
        overall_ratio: if overall_total > 0 {
            historical.len() as f64 / overall_total as f64
        } else {
            0.0
        },
        overall_total,
        years,
        counts,
        totals,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoricalRow {
    pub topic_id: usize,
    pub main_area: MainArea,
    pub subareas: Vec<String>,
    pub words: Vec<String>,
    pub num_docs: usize,
}

/// Historical topics with more than `min_docs` documents, grouped by main
/// area and sorted by document count.
pub fn historical_topic_table(
    model: &FittedModel,
    assignments: &[TopicAssignment],
    tags: &[TopicTags],
    min_docs: usize,
    top_n: usize,
) -> Vec<HistoricalRow> {
    let mut rows: Vec<HistoricalRow> = assignments
        .iter()
        .filter_map(|a| {
            let tag = tag_for(tags, a.topic_id)?;
            (tag.historical && a.docs.len() > min_docs).then(|| HistoricalRow {
                topic_id: a.topic_id,
                main_area: tag.main_area,
                subareas: tag.subareas.clone(),
                words: profile_of(model, &[a.topic_id], top_n).into_iter().map(|(w, _)| w).collect(),
                num_docs: a.docs.len(),
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        a.main_area
            .cmp(&b.main_area)
            .then(b.num_docs.cmp(&a.num_docs))
            .then(a.topic_id.cmp(&b.topic_id))
    });
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;
    use crate::model::{DocTopics, Hyperparams, TopicChain, TrainLog};

    fn model(topics: Vec<Vec<Vec<f64>>>) -> FittedModel {
        let k = topics.len();
        let t = topics[0].len();
        let v = topics[0][0].len();
        FittedModel {
            hyper: Hyperparams {
                num_topics: k,
                ..Default::default()
            },
            vocabulary: Vocabulary::from((0..v).map(|i| format!("w{i}")).collect::<Vec<_>>()),
            slice_labels: (0..t).map(|s| s.to_string()).collect(),
            chains: topics
                .into_iter()
                .map(|slices| TopicChain {
                    natural_params: slices.into_iter().map(|p| p.iter().map(|x: &f64| x.ln()).collect()).collect(),
                })
                .collect(),
            alpha_path: vec![vec![0.0; k]; t],
            docs: Vec::<DocTopics>::new(),
            train_log: TrainLog::default(),
        }
    }

    fn tag(k: usize, area: MainArea, subs: &[&str], historical: bool) -> TopicTags {
        TopicTags {
            topic_id: k,
            main_area: area,
            subareas: subs.iter().map(|s| s.to_string()).collect(),
            historical,
        }
    }

    fn assignment(k: usize, ids: &[&str]) -> TopicAssignment {
        TopicAssignment {
            topic_id: k,
            docs: ids.iter().map(|id| (id.to_string(), 0.5)).collect(),
            mass_covered: 0.5,
        }
    }

    #[test]
    fn single_topic_profile_is_its_own_ranking() {
        let m = model(vec![vec![vec![0.1, 0.6, 0.3]], vec![vec![0.5, 0.2, 0.3]]]);
        let tags = vec![tag(0, MainArea::ValueTheory, &[], false), tag(1, MainArea::Other, &[], false)];
        let p = area_word_profile(&m, &tags, MainArea::ValueTheory, 2).unwrap();
        assert_eq!(p[0].0, "w1");
        assert_eq!(p[1].0, "w2");
        assert!((p[0].1 - 0.6).abs() < 1e-12);
        assert!(matches!(
            area_word_profile(&m, &tags, MainArea::PhilTraditions, 2),
            Err(TaxonomyError::NoTopicsInArea(_))
        ));
    }

    #[test]
    fn two_topic_profile_matches_hand_average() {
        let m = model(vec![
            vec![vec![0.1, 0.6, 0.3], vec![0.2, 0.5, 0.3]],
            vec![vec![0.7, 0.2, 0.1], vec![0.4, 0.4, 0.2]],
        ]);
        let tags = vec![tag(0, MainArea::ValueTheory, &[], false), tag(1, MainArea::ValueTheory, &[], false)];
        let p = area_word_profile(&m, &tags, MainArea::ValueTheory, 3).unwrap();
        let expected = [("w0", 1.4 / 4.0), ("w1", 1.7 / 4.0), ("w2", 0.9 / 4.0)];
        for (word, prob) in expected {
            let got = p.iter().find(|(w, _)| w == word).unwrap().1;
            assert!((got - prob).abs() < 1e-12);
        }
        assert_eq!(p[0].0, "w1");
    }

    #[test]
    fn area_counts_deduplicate_within_area() {
        let tags = vec![
            tag(0, MainArea::ValueTheory, &["Ethics"], false),
            tag(1, MainArea::ValueTheory, &["Kant"], true),
            tag(2, MainArea::HistoryWesternPhil, &["Kant"], true),
        ];
        let assignments = vec![
            assignment(0, &["a", "b"]),
            assignment(1, &["a"]),
            assignment(2, &["a", "c"]),
        ];
        let docs: BTreeMap<String, i32> =
            [("a", 2000), ("b", 2000), ("c", 2001), ("d", 2001)].iter().map(|(i, y)| (i.to_string(), *y)).collect();
        let c = area_counts_by_year(&assignments, &tags, &docs).unwrap();
        assert_eq!(c.years, vec![2000, 2001]);
        assert_eq!(c.totals, vec![2, 2]);
        assert_eq!(c.counts[&MainArea::ValueTheory], vec![2, 0]);
        assert_eq!(c.counts[&MainArea::HistoryWesternPhil], vec![1, 1]);
        assert_eq!(c.overall[&MainArea::ValueTheory], 2);
        assert_eq!(c.ratios(MainArea::HistoryWesternPhil), vec![0.5, 0.5]);

        let h = historical_ratio_series(&assignments, &tags, &docs, None).unwrap();
        assert_eq!(h.counts, vec![1, 1]);
        assert_eq!(h.overall_count, 2);
        assert!((h.overall_ratio - 0.5).abs() < 1e-15);
        let later = historical_ratio_series(&assignments, &tags, &docs, Some(2001)).unwrap();
        assert_eq!(later.points(), vec![(2001, 0.5)]);

        let series = largest_subarea_series(&assignments, &tags, &docs).unwrap();
        let vt = series.iter().find(|s| s.main_area == MainArea::ValueTheory).unwrap();
        assert_eq!(vt.subarea, "Ethics");
        assert_eq!(vt.counts, vec![2, 0]);

        let missing = vec![assignment(0, &["zzz"])];
        assert!(matches!(
            area_counts_by_year(&missing, &tags, &docs),
            Err(TaxonomyError::UnknownDocId(id)) if id == "zzz"
        ));
    }

    #[test]
    fn no_historical_tags_gives_zero_ratios() {
        let tags = vec![tag(0, MainArea::Other, &[], false)];
        let docs: BTreeMap<String, i32> = [("a".to_string(), 1990), ("b".to_string(), 1991)].into();
        let h = historical_ratio_series(&[assignment(0, &["a", "b"])], &tags, &docs, None).unwrap();
        assert_eq!(h.ratios, vec![0.0, 0.0]);
        assert_eq!(h.overall_ratio, 0.0);
    }

    #[test]
    fn subarea_and_historical_tables() {
        let m = model(vec![vec![vec![0.1, 0.6, 0.3]], vec![vec![0.5, 0.2, 0.3]], vec![vec![0.3, 0.3, 0.4]]]);
        let tags = vec![
            tag(0, MainArea::ValueTheory, &["Ethics", "Kant"], true),
            tag(1, MainArea::ValueTheory, &["Kant"], false),
            tag(2, MainArea::Other, &[], true),
        ];
        let ids: Vec<String> = (0..8).map(|i| format!("d{i}")).collect();
        let r: Vec<&str> = ids.iter().map(String::as_str).collect();
        let assignments = vec![assignment(0, &r[..6]), assignment(1, &r[4..8]), assignment(2, &r[..2])];
        let rows = subarea_table(&m, &assignments, &tags, 5, 2);
        assert_eq!(rows[0].subarea, "Kant");
        assert_eq!(rows[0].num_docs, 8);
        assert_eq!(rows[1].subarea, "Ethics");
        assert_eq!(rows[1].num_docs, 6);
        assert_eq!(rows[1].words, vec!["w1", "w2"]);

        let hist = historical_topic_table(&m, &assignments, &tags, 5, 3);
        assert_eq!(hist.len(), 1);
        assert_eq!(hist[0].topic_id, 0);
        assert_eq!(hist[0].num_docs, 6);
    }
}
