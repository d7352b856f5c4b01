//! Mean and sample standard deviation of score cards per group.

use super::score::{Metric, ScoreCard};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStat {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 when n = 1.
    pub sd: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub group: String,
    pub stats: [MetricStat; 5],
}

impl AggregateRow {
    pub fn stat(&self, m: Metric) -> MetricStat {
        self.stats[m as usize]
    }
}

/// Mean and sample SD of `values`. Values are summed in sorted order, so the
/// result does not depend on input order.
pub fn mean_sd(values: &[f64]) -> MetricStat {
    assert!(!values.is_empty(), "cannot aggregate an empty list");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let sd = if n == 1 {
        0.0
    } else {
        let mut dev: Vec<f64> = sorted.iter().map(|v| (v - mean).powi(2)).collect();
        dev.sort_by(f64::total_cmp);
        (dev.iter().sum::<f64>() / (n - 1) as f64).sqrt()
    };
    MetricStat { mean, sd, n }
}

/// One row per distinct group key, sorted by key.
pub fn aggregate<F>(cards: &[ScoreCard], key: F) -> Vec<AggregateRow>
where
    F: Fn(&ScoreCard) -> String,
{
    let mut groups: BTreeMap<String, Vec<&ScoreCard>> = BTreeMap::new();
    for c in cards {
        groups.entry(key(c)).or_default().push(c);
    }
    groups
        .into_iter()
        .map(|(group, members)| AggregateRow {
            group,
            stats: Metric::ALL.map(|m| mean_sd(&members.iter().map(|c| c.get(m)).collect::<Vec<_>>())),
        })
        .collect()
}

/// Groups by model id.
pub fn aggregate_by_model(cards: &[ScoreCard]) -> Vec<AggregateRow> {
    aggregate(cards, |c| c.model.clone())
}
