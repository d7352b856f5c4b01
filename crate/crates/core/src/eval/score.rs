//! Rubric scoring of pipeline runs on the five 0-5 metrics.

use crate::arm::{verify_design, DesignFindings, DEFAULT_MARGIN};
use crate::extract::{CANONICAL_FILES, HEADER_FIELDS};
use crate::pipeline::{execution_design, PipelineArtifacts, Stage, StageStatus};
use crate::report::{line_fence, locate_sections, RL_DESIGN_HEADINGS, ROBOT_DESIGN_HEADINGS, TASK_ANALYSIS_HEADINGS};
use crate::rl::{parse_rlspec, RlSpecError, TrainingResult};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    Tcp,
    Cef,
    Ma,
    Rda,
    Rm,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Tcp, Metric::Cef, Metric::Ma, Metric::Rda, Metric::Rm];

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Tcp => "tcp",
            Metric::Cef => "cef",
            Metric::Ma => "ma",
            Metric::Rda => "rda",
            Metric::Rm => "rm",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Metric::Tcp => "TCP",
            Metric::Cef => "CEF",
            Metric::Ma => "MA",
            Metric::Rda => "RDA",
            Metric::Rm => "RM",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Auto,
    Manual(String),
}

impl Provenance {
    pub fn flag(&self) -> String {
        match self {
            Provenance::Auto => "auto".to_string(),
            Provenance::Manual(who) => format!("manual:{who}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub run_id: String,
    pub model: String,
    /// Scenario id (generalization) or condition name (ablation).
    pub case: String,
    pub tcp: f64,
    pub cef: f64,
    pub ma: f64,
    pub rda: f64,
    pub rm: f64,
    pub provenance: [Provenance; 5],
}

impl ScoreCard {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::Tcp => self.tcp,
            Metric::Cef => self.cef,
            Metric::Ma => self.ma,
            Metric::Rda => self.rda,
            Metric::Rm => self.rm,
        }
    }

    fn slot(&mut self, m: Metric) -> &mut f64 {
        match m {
            Metric::Tcp => &mut self.tcp,
            Metric::Cef => &mut self.cef,
            Metric::Ma => &mut self.ma,
            Metric::Rda => &mut self.rda,
            Metric::Rm => &mut self.rm,
        }
    }

    pub fn provenance_of(&self, m: Metric) -> &Provenance {
        &self.provenance[m as usize]
    }

    /// Replaces a subjective metric (RDA or RM) with an annotator's value.
    pub fn set_manual(&mut self, m: Metric, value: f64, annotator: &str) -> Result<(), String> {
        if !matches!(m, Metric::Rda | Metric::Rm) {
            return Err(format!("{m} is always scored automatically"));
        }
        if !(0.0..=5.0).contains(&value) {
            return Err(format!("{m} value {value} outside [0, 5]"));
        }
        *self.slot(m) = value;
        self.provenance[m as usize] = Provenance::Manual(annotator.to_string());
        Ok(())
    }
}

/// One point per completed stage.
pub fn score_tcp(status: &StageStatus) -> f64 {
    status.completed_count() as f64
}

/// Static and spec-level proxies for "the generated code runs".
pub fn score_cef(artifacts: &PipelineArtifacts) -> f64 {
    let Some(rl) = artifacts.rl.as_ref() else {
        return 0.0;
    };
    let programs: Vec<&str> = artifacts.program_files().map(|c| c.filename.as_str()).collect();
    let mut score: f64 = 0.0;
    if programs.len() >= 3 {
        score += 1.0;
    }
    if CANONICAL_FILES.iter().all(|f| programs.contains(f)) {
        score += 1.0;
    }
    let design =
        execution_design(&artifacts.scenario, artifacts.analysis.as_ref(), artifacts.design.as_ref(), DEFAULT_MARGIN);
    let parsed = match &design {
        Ok(d) => parse_rlspec(rl, d),
        Err(_) => Err(RlSpecError::EmptyDesign),
    };
    let parseable =
        rl.rlspec.is_some() && !matches!(parsed, Err(RlSpecError::Missing | RlSpecError::InvalidField { .. }));
    if parseable {
        score += 1.0;
    }
    if parsed.is_ok() {
        score += 1.0;
    }
    if artifacts.execution.is_some() {
        score += 1.0;
    }
    score.min(5.0)
}

/// Execution outcome: 5 times the fraction of targets reached (to the
/// nearest half point), one point off without learning progress, zero when
/// training diverged or nothing ran.
pub fn score_ma(results: &[TrainingResult]) -> f64 {
    if results.is_empty() || results.iter().any(TrainingResult::diverged) {
        return 0.0;
    }
    let total: usize = results.iter().map(|r| r.success.len()).sum();
    if total == 0 {
        return 0.0;
    }
    let reached: usize = results.iter().map(|r| r.success.iter().filter(|s| **s).count()).sum();
    let base = (10.0 * reached as f64 / total as f64).round() / 2.0;
    let progress = results.iter().all(TrainingResult::shows_progress);
    if progress {
        base
    } else {
        (base - 1.0).max(0.0)
    }
}

/// Design rubric: reachability (2), options (1), cost within 25% (1) and 5%
/// (1) of the optimum. Cost points require every target to be reachable.
pub fn score_rda(findings: &DesignFindings) -> f64 {
    let mut score = 0.0;
    if findings.all_reachable {
        score += 2.0;
    }
    if findings.links_in_options && findings.bases_in_options {
        score += 1.0;
    }
    if findings.all_reachable {
        if let Some(ratio) = findings.cost_ratio {
            if ratio <= 1.25 + 1e-9 {
                score += 1.0;
            }
            if ratio <= 1.05 + 1e-9 {
                score += 1.0;
            }
        }
    }
    score
}

fn group_present(report: &str, headings: &[&str]) -> bool {
    locate_sections(report, headings).iter().all(|s| s.as_ref().is_some_and(|s| !s.body.trim().is_empty()))
}

/// Number of fence delimiter lines in `text`.
pub fn count_fences(text: &str) -> usize {
    text.lines().filter(|l| line_fence(l).is_some()).count()
}

fn header_complete(report: &str) -> bool {
    let head: Vec<&str> = report.lines().take(12).collect();
    HEADER_FIELDS.iter().all(|field| {
        head.iter().any(|l| {
            let l = l.trim_start_matches(['-', '*', ' ']);
            l.strip_prefix(field).and_then(|rest| rest.strip_prefix(':')).is_some_and(|v| !v.trim().is_empty())
        })
    }) && head
        .iter()
        .find_map(|l| l.trim_start_matches(['-', '*', ' ']).strip_prefix("Stages:"))
        .is_some_and(|v| Stage::ALL.iter().all(|s| v.contains(s.as_str())))
}

/// Report rubric: one point per complete section group, one for a code-free
/// report (only once the RL group is present), one for a complete header.
pub fn score_rm(final_report: &str) -> f64 {
    let mut score = 0.0;
    for headings in [&TASK_ANALYSIS_HEADINGS[..], &ROBOT_DESIGN_HEADINGS[..], &RL_DESIGN_HEADINGS[..]] {
        if group_present(final_report, headings) {
            score += 1.0;
        }
    }
    if group_present(final_report, &RL_DESIGN_HEADINGS) && count_fences(final_report) == 0 {
        score += 1.0;
    }
    if header_complete(final_report) {
        score += 1.0;
    }
    score
}

/// Design findings for a run, if the Robot Designer produced a report.
pub fn design_findings(artifacts: &PipelineArtifacts) -> Option<DesignFindings> {
    artifacts.design.as_ref().map(|d| verify_design(d, &artifacts.scenario, DEFAULT_MARGIN))
}

/// Scores one run automatically. `case` labels the row (scenario id or
/// ablation condition).
pub fn score_run(artifacts: &PipelineArtifacts, case: &str) -> ScoreCard {
    let ma = artifacts.execution.as_ref().map(|e| score_ma(&e.results)).unwrap_or(0.0);
    let rda = design_findings(artifacts).map(|f| score_rda(&f)).unwrap_or(0.0);
    ScoreCard {
        run_id: artifacts.run_id(),
        model: artifacts.model_id.clone(),
        case: case.to_string(),
        tcp: score_tcp(&artifacts.status),
        cef: score_cef(artifacts),
        ma,
        rda,
        rm: score_rm(&artifacts.final_report),
        provenance: std::array::from_fn(|_| Provenance::Auto),
    }
}

/// One line of a manual override file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManualScore {
    pub run_id: String,
    pub metric: String,
    pub value: f64,
    pub annotator: String,
}

/// Applies manual scores (a JSON list of [`ManualScore`]) to matching cards.
/// Returns the number applied.
pub fn apply_overrides(cards: &mut [ScoreCard], overrides: &[ManualScore]) -> Result<usize, String> {
    let mut applied = 0;
    for o in overrides {
        let metric: Metric = o.metric.parse()?;
        for card in cards.iter_mut().filter(|c| c.run_id == o.run_id) {
            card.set_manual(metric, o.value, &o.annotator)?;
            applied += 1;
        }
    }
    Ok(applied)
}

pub fn parse_overrides(json: &str) -> Result<Vec<ManualScore>, String> {
    serde_json::from_str(json).map_err(|e| format!("override file: {e}"))
}
