//! Batch runners for the generalization and ablation studies, score matrix
//! export, and recording of replay fixtures against the stub provider.

use super::aggregate::{aggregate, AggregateRow};
use super::score::{score_run, Metric, ScoreCard};
use crate::gateway::{Gateway, GatewayError, GatewayMode};
use crate::geometry::fmt_num;
use crate::pipeline::{run_pipeline_with, AblationConfig, PipelineArtifacts, RunOptions};
use crate::scenario::{builtin_scenarios, example_scenario, find_builtin};
use serde::{Deserialize, Serialize};
use std::fmt::Write;
use std::path::{Path, PathBuf};

/// Model ids served by the stub provider and covered by the shipped fixtures.
pub const DEFAULT_MODELS: [&str; 3] = ["stub-ppo", "stub-sac", "stub-cem"];
pub const STUB_ENDPOINT: &str = "stub://local";

/// Replay fixtures shipped with the crate.
pub fn shipped_fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("replay")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Study {
    Generalization,
    Ablation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub study: Study,
    pub cards: Vec<ScoreCard>,
    /// Per model (generalization) or per condition (ablation).
    pub rows: Vec<AggregateRow>,
}

/// Every built-in scenario at Normal length without disables, per model.
pub fn run_generalization(
    models: &[&str],
    gateway: &Gateway,
    options: &RunOptions,
    mut on_run: impl FnMut(&PipelineArtifacts),
) -> ScoreMatrix {
    let mut cards = Vec::new();
    for model in models {
        for scenario in builtin_scenarios() {
            let art = run_pipeline_with(&scenario, &AblationConfig::default(), gateway, model, options);
            cards.push(score_run(&art, &scenario.id));
            on_run(&art);
        }
    }
    let rows = aggregate(&cards, |c| c.model.clone());
    ScoreMatrix { study: Study::Generalization, cards, rows }
}

/// The three length conditions and the six disable conditions on the
/// Example scenario, per model.
pub fn ablation_conditions() -> Vec<AblationConfig> {
    let mut all = AblationConfig::length_conditions();
    all.extend(AblationConfig::disable_conditions());
    all
}

pub fn run_ablation(
    models: &[&str],
    gateway: &Gateway,
    options: &RunOptions,
    mut on_run: impl FnMut(&PipelineArtifacts),
) -> ScoreMatrix {
    let scenario = example_scenario();
    let mut cards = Vec::new();
    for model in models {
        for cond in ablation_conditions() {
            let art = run_pipeline_with(&scenario, &cond, gateway, model, options);
            cards.push(score_run(&art, &cond.condition_name()));
            on_run(&art);
        }
    }
    let rows = aggregate(&cards, |c| c.case.clone());
    ScoreMatrix { study: Study::Ablation, cards, rows }
}

pub const SCORES_HEADER: &str =
    "run_id,model,case,tcp,cef,ma,rda,rm,tcp_source,cef_source,ma_source,rda_source,rm_source";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn scores_csv(cards: &[ScoreCard]) -> String {
    let mut out = format!("{SCORES_HEADER}\n");
    for c in cards {
        let values: Vec<String> = Metric::ALL.iter().map(|m| fmt_num(c.get(*m))).collect();
        let sources: Vec<String> = Metric::ALL.iter().map(|m| csv_field(&c.provenance_of(*m).flag())).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            csv_field(&c.run_id),
            csv_field(&c.model),
            csv_field(&c.case),
            values.join(","),
            sources.join(",")
        );
    }
    out
}

/// Markdown tables: one row per card, then mean ± SD per group.
pub fn summary_markdown(matrix: &ScoreMatrix) -> String {
    let (title, case_label, group_label) = match matrix.study {
        Study::Generalization => ("Generalization study", "Scenario", "Model"),
        Study::Ablation => ("Ablation study", "Condition", "Condition"),
    };
    let metrics: Vec<&str> = Metric::ALL.iter().map(|m| m.label()).collect();
    let mut out = format!("# {title}\n\n");
    let _ = writeln!(out, "| Model | {case_label} | {} |", metrics.join(" | "));
    let _ = writeln!(out, "|---|---|{}", "---|".repeat(metrics.len()));
    for c in &matrix.cards {
        let vals: Vec<String> = Metric::ALL.iter().map(|m| fmt_num(c.get(*m))).collect();
        let _ = writeln!(out, "| {} | {} | {} |", c.model, c.case, vals.join(" | "));
    }
    let _ = writeln!(out, "\n## Mean and SD per {}\n", group_label.to_lowercase());
    let _ = writeln!(out, "| {group_label} | n | {} |", metrics.join(" | "));
    let _ = writeln!(out, "|---|---|{}", "---|".repeat(metrics.len()));
    for row in &matrix.rows {
        let vals: Vec<String> = row.stats.iter().map(|s| format!("{:.2} ± {:.2}", s.mean, s.sd)).collect();
        let _ = writeln!(out, "| {} | {} | {} |", row.group, row.stats[0].n, vals.join(" | "));
    }
    out
}

/// Re-records the shipped fixture set into `dir` against the stub
/// provider: both studies for every model plus every condition of
/// scenario 1. Returns the number of runs performed.
pub fn record_stub_fixtures(dir: &Path, models: &[&str]) -> Result<usize, GatewayError> {
    let gateway = Gateway::new(GatewayMode::Record {
        endpoint: STUB_ENDPOINT.to_string(),
        credential_env: None,
        fixture_dir: dir.to_path_buf(),
    })?;
    let options = RunOptions { execute: false, ..RunOptions::default() };
    let mut runs = 0;
    let mut count = |_: &PipelineArtifacts| runs += 1;
    run_generalization(models, &gateway, &options, &mut count);
    run_ablation(models, &gateway, &options, &mut count);
    let one = find_builtin("1").expect("scenario 1");
    for model in models {
        for cond in ablation_conditions() {
            run_pipeline_with(&one, &cond, &gateway, model, &options);
            runs += 1;
        }
    }
    Ok(runs)
}
