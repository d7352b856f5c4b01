//! The linear three-agent workflow: Task Analyst → Robot Designer → RL
//! Designer, followed by code extraction and native execution, with
//! switches that disable agents for ablation studies.

pub mod prompts;

pub use prompts::{rl_designer_prompt, robot_designer_prompt, task_analyst_prompt};

use crate::arm::{design_from_report, design_robots, DesignProblem, RobotDesign, DEFAULT_MARGIN};
use crate::extract::{extract_code, merge_reports, CodeArtifact};
use crate::gateway::{ChatRequest, ChatResponse, Gateway};
use crate::report::{
    parse_rl_design, parse_robot_design, parse_task_analysis, RlDesignReport, RobotDesignReport, TaskAnalysisReport,
};
use crate::rl::{evaluate, parse_rlspec, train, RlSpec, RlSpecError, TrainingResult, Trajectory};
use crate::scenario::{render_description, DescriptionLength, TaskScenario};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

pub const ABSENT_NOTICE: &str = "UPSTREAM STAGE ABSENT:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Agent {
    TaskAnalyst,
    RobotDesigner,
    RlDesigner,
}

impl Agent {
    pub const ALL: [Agent; 3] = [Agent::TaskAnalyst, Agent::RobotDesigner, Agent::RlDesigner];

    /// Table position used in condition names (C1, C2, C3).
    pub fn number(&self) -> usize {
        match self {
            Agent::TaskAnalyst => 1,
            Agent::RobotDesigner => 2,
            Agent::RlDesigner => 3,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Agent::TaskAnalyst => "task_analyst",
            Agent::RobotDesigner => "robot_designer",
            Agent::RlDesigner => "rl_designer",
        }
    }

    /// The report stage this agent produces.
    pub fn stage(&self) -> Stage {
        match self {
            Agent::TaskAnalyst => Stage::Analysis,
            Agent::RobotDesigner => Stage::Design,
            Agent::RlDesigner => Stage::RlReport,
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Agent {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s.to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        match norm.as_str() {
            "taskanalyst" | "analyst" | "a1" | "1" => Ok(Agent::TaskAnalyst),
            "robotdesigner" | "designer" | "a2" | "2" => Ok(Agent::RobotDesigner),
            "rldesigner" | "rl" | "a3" | "3" => Ok(Agent::RlDesigner),
            _ => Err(format!("unknown agent `{s}` (expected task_analyst, robot_designer or rl_designer)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    Analysis,
    Design,
    RlReport,
    CodeExtraction,
    Execution,
}

impl Stage {
    pub const ALL: [Stage; 5] =
        [Stage::Analysis, Stage::Design, Stage::RlReport, Stage::CodeExtraction, Stage::Execution];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Analysis => "Analysis",
            Stage::Design => "Design",
            Stage::RlReport => "RLReport",
            Stage::CodeExtraction => "CodeExtraction",
            Stage::Execution => "Execution",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageOutcome {
    Completed,
    /// Not run because the responsible agent is disabled.
    Skipped,
    Failed(String),
}

impl StageOutcome {
    pub fn is_completed(&self) -> bool {
        matches!(self, StageOutcome::Completed)
    }
}

impl fmt::Display for StageOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageOutcome::Completed => f.write_str("Completed"),
            StageOutcome::Skipped => f.write_str("Skipped"),
            StageOutcome::Failed(why) => write!(f, "Failed ({why})"),
        }
    }
}

/// Outcome of every stage, in pipeline order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageStatus {
    pub stages: Vec<(Stage, StageOutcome)>,
}

impl StageStatus {
    pub fn get(&self, stage: Stage) -> &StageOutcome {
        &self.stages.iter().find(|(s, _)| *s == stage).expect("all stages recorded").1
    }

    pub fn completed_count(&self) -> usize {
        self.stages.iter().filter(|(_, o)| o.is_completed()).count()
    }

    pub fn completed(&self) -> BTreeSet<Stage> {
        self.stages.iter().filter(|(_, o)| o.is_completed()).map(|(s, _)| *s).collect()
    }
}

/// Which agents are disabled, and the description length used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationConfig {
    pub disabled: BTreeSet<Agent>,
    pub length: DescriptionLength,
}

impl Default for AblationConfig {
    fn default() -> Self {
        Self { disabled: BTreeSet::new(), length: DescriptionLength::Normal }
    }
}

impl AblationConfig {
    /// Panics when all three agents are disabled; see [`Self::try_new`].
    pub fn new(disabled: impl IntoIterator<Item = Agent>, length: DescriptionLength) -> Self {
        Self::try_new(disabled, length).expect("valid ablation")
    }

    /// At most two agents may be disabled: with none left there is no run.
    pub fn try_new(disabled: impl IntoIterator<Item = Agent>, length: DescriptionLength) -> Result<Self, String> {
        let disabled: BTreeSet<Agent> = disabled.into_iter().collect();
        if disabled.len() > 2 {
            return Err("at most two agents can be disabled".into());
        }
        Ok(Self { disabled, length })
    }

    pub fn with_length(length: DescriptionLength) -> Self {
        Self { disabled: BTreeSet::new(), length }
    }

    pub fn is_enabled(&self, agent: Agent) -> bool {
        !self.disabled.contains(&agent)
    }

    /// `Short`/`Normal`/`Long` without disables, otherwise `C1`..`C23`
    /// (with a length suffix when the length is not Normal).
    pub fn condition_name(&self) -> String {
        let length = match self.length {
            DescriptionLength::Short => "Short",
            DescriptionLength::Normal => "Normal",
            DescriptionLength::Long => "Long",
        };
        if self.disabled.is_empty() {
            return length.to_string();
        }
        let digits: String = self.disabled.iter().map(|a| a.number().to_string()).collect();
        if self.length == DescriptionLength::Normal {
            format!("C{digits}")
        } else {
            format!("C{digits}-{length}")
        }
    }

    /// Parses a condition name such as `C13` or `Long`.
    pub fn from_condition(name: &str) -> Result<Self, String> {
        if let Ok(length) = name.parse::<DescriptionLength>() {
            return Ok(Self::with_length(length));
        }
        let digits = name
            .strip_prefix(['C', 'c'])
            .filter(|d| !d.is_empty() && d.len() <= 2 && d.chars().all(|c| ('1'..='3').contains(&c)))
            .ok_or_else(|| format!("unknown ablation condition `{name}`"))?;
        let agents: BTreeSet<Agent> = digits.chars().map(|c| c.to_string().parse().unwrap()).collect();
        if agents.len() != digits.len() {
            return Err(format!("unknown ablation condition `{name}`"));
        }
        Ok(Self { disabled: agents, length: DescriptionLength::Normal })
    }

    /// The six agent-disable conditions, in table order.
    pub fn disable_conditions() -> Vec<AblationConfig> {
        ["C1", "C2", "C3", "C12", "C13", "C23"].iter().map(|c| Self::from_condition(c).unwrap()).collect()
    }

    /// The three description-length conditions (no disables).
    pub fn length_conditions() -> Vec<AblationConfig> {
        DescriptionLength::ALL.iter().map(|l| Self::with_length(*l)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub agent: Agent,
    pub request: ChatRequest,
    pub response: Option<ChatResponse>,
    pub error: Option<String>,
}

/// Result of the native execution stage, one entry per robot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionOutcome {
    pub design: RobotDesign,
    pub specs: Vec<RlSpec>,
    pub results: Vec<TrainingResult>,
    /// Deterministic evaluation per robot and target.
    pub trajectories: Vec<Vec<Trajectory>>,
}

impl ExecutionOutcome {
    /// Trains every spec and evaluates the resulting policies on each of
    /// their targets.
    pub fn train(design: RobotDesign, specs: Vec<RlSpec>) -> Self {
        let results: Vec<TrainingResult> = specs.iter().map(train).collect();
        let trajectories = specs
            .iter()
            .zip(&results)
            .map(|(spec, r)| (0..spec.targets.len()).map(|t| evaluate(&r.policy, spec, t)).collect())
            .collect();
        Self { design, specs, results, trajectories }
    }

    pub fn all_success(&self) -> bool {
        self.results.iter().all(|r| r.all_success())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineArtifacts {
    pub scenario: TaskScenario,
    pub model_id: String,
    pub ablation: AblationConfig,
    pub description: String,
    pub analysis: Option<TaskAnalysisReport>,
    pub design: Option<RobotDesignReport>,
    pub rl: Option<RlDesignReport>,
    pub code_files: Vec<CodeArtifact>,
    pub final_report: String,
    pub status: StageStatus,
    pub transcript: Vec<TranscriptEntry>,
    /// Why the rlspec could not be turned into training specs, if it could not.
    pub spec_error: Option<RlSpecError>,
    pub execution: Option<ExecutionOutcome>,
}

impl PipelineArtifacts {
    pub fn run_id(&self) -> String {
        let model: String = self
            .model_id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
            .collect();
        format!("{}_{}_{}", self.scenario.id, model, self.ablation.condition_name())
    }

    /// Code files other than the rlspec block.
    pub fn program_files(&self) -> impl Iterator<Item = &CodeArtifact> {
        self.code_files.iter().filter(|c| !c.is_rlspec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Run the native RL engine in the Execution stage.
    pub execute: bool,
    /// Reachability margin for designs the pipeline computes itself.
    pub margin: f64,
    /// Overrides the rlspec episode count (used by quick runs).
    pub episodes: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { execute: true, margin: DEFAULT_MARGIN, episodes: None }
    }
}

/// Input text for an agent: the latest upstream text, preceded by one notice
/// line per absent upstream stage.
fn with_notices(text: &str, absent: &[Stage]) -> String {
    if absent.is_empty() {
        return text.to_string();
    }
    let mut out: String = absent.iter().map(|s| format!("{ABSENT_NOTICE} {s}\n")).collect();
    out.push('\n');
    out.push_str(text);
    out
}

struct Runner<'a> {
    gateway: &'a Gateway,
    model_id: &'a str,
    transcript: Vec<TranscriptEntry>,
}

impl Runner<'_> {
    fn call(&mut self, agent: Agent, request: ChatRequest) -> Result<String, String> {
        let result = self.gateway.complete(&request);
        let (response, error) = match result {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let out = match (&response, &error) {
            (Some(r), _) => Ok(r.content.clone()),
            (_, Some(e)) => Err(format!("gateway: {e}")),
            _ => unreachable!(),
        };
        self.transcript.push(TranscriptEntry { agent, request, response, error });
        out
    }
}

/// Runs one scenario through the pipeline with default options.
pub fn run_pipeline(
    scenario: &TaskScenario,
    ablation: &AblationConfig,
    gateway: &Gateway,
    model_id: &str,
) -> PipelineArtifacts {
    run_pipeline_with(scenario, ablation, gateway, model_id, &RunOptions::default())
}

/// Runs one scenario through the pipeline. Failures are recorded in the
/// stage status; nothing is raised to the caller.
pub fn run_pipeline_with(
    scenario: &TaskScenario,
    ablation: &AblationConfig,
    gateway: &Gateway,
    model_id: &str,
    options: &RunOptions,
) -> PipelineArtifacts {
    let description = render_description(scenario, ablation.length);
    let mut runner = Runner { gateway, model_id, transcript: Vec::new() };
    let mut outcomes: Vec<(Stage, StageOutcome)> = Vec::new();
    let mut upstream = description.clone();
    let mut absent: Vec<Stage> = Vec::new();
    let mut broken: Option<Stage> = None;

    let mut analysis = None;
    let mut design = None;
    let mut rl = None;

    for agent in Agent::ALL {
        let stage = agent.stage();
        if !ablation.is_enabled(agent) {
            outcomes.push((stage, StageOutcome::Skipped));
            absent.push(stage);
            continue;
        }
        if let Some(b) = broken {
            outcomes.push((stage, StageOutcome::Failed(format!("upstream stage {b} failed"))));
            continue;
        }
        let input = with_notices(&upstream, &absent);
        let request = match agent {
            Agent::TaskAnalyst => task_analyst_prompt(runner.model_id, &input),
            Agent::RobotDesigner => robot_designer_prompt(runner.model_id, &input),
            Agent::RlDesigner => rl_designer_prompt(runner.model_id, &input),
        };
        let outcome = match runner.call(agent, request) {
            Err(e) => StageOutcome::Failed(e),
            Ok(text) => {
                let parsed = match agent {
                    Agent::TaskAnalyst => parse_task_analysis(&text).map(|r| analysis = Some(r)),
                    Agent::RobotDesigner => parse_robot_design(&text).map(|r| design = Some(r)),
                    Agent::RlDesigner => parse_rl_design(&text).map(|r| rl = Some(r)),
                };
                match parsed {
                    Ok(()) => {
                        upstream = text;
                        absent.clear();
                        StageOutcome::Completed
                    }
                    Err(e) => StageOutcome::Failed(format!("report: {e}")),
                }
            }
        };
        if !outcome.is_completed() {
            broken = Some(stage);
        }
        outcomes.push((stage, outcome));
    }

    // code extraction belongs to the RL Designer's output
    let mut code_files = Vec::new();
    let extraction = if !ablation.is_enabled(Agent::RlDesigner) {
        StageOutcome::Skipped
    } else if let Some(b) = broken {
        StageOutcome::Failed(format!("upstream stage {b} failed"))
    } else {
        let report: &RlDesignReport = rl.as_ref().expect("RL report present when its stage completed");
        code_files = extract_code(&report.raw_markdown);
        let programs = code_files.iter().filter(|c| !c.is_rlspec()).count();
        if programs >= 3 {
            StageOutcome::Completed
        } else {
            StageOutcome::Failed(format!("{programs} code files extracted, 3 required"))
        }
    };
    if !extraction.is_completed() && broken.is_none() && ablation.is_enabled(Agent::RlDesigner) {
        broken = Some(Stage::CodeExtraction);
    }
    outcomes.push((Stage::CodeExtraction, extraction));

    let mut spec_error = None;
    let mut execution = None;
    let exec_outcome = if !ablation.is_enabled(Agent::RlDesigner) {
        StageOutcome::Skipped
    } else if let Some(b) = broken {
        StageOutcome::Failed(format!("upstream stage {b} failed"))
    } else {
        match execute(scenario, analysis.as_ref(), design.as_ref(), rl.as_ref().unwrap(), options) {
            Ok(Some(out)) => {
                execution = Some(out);
                StageOutcome::Completed
            }
            Ok(None) => StageOutcome::Skipped,
            Err(ExecError::Spec(e)) => {
                let msg = e.to_string();
                spec_error = Some(e);
                StageOutcome::Failed(msg)
            }
            Err(ExecError::Design(msg)) => StageOutcome::Failed(msg),
        }
    };
    outcomes.push((Stage::Execution, exec_outcome));

    let mut artifacts = PipelineArtifacts {
        scenario: scenario.clone(),
        model_id: model_id.to_string(),
        ablation: ablation.clone(),
        description,
        analysis,
        design,
        rl,
        code_files,
        final_report: String::new(),
        status: StageStatus { stages: outcomes },
        transcript: runner.transcript,
        spec_error,
        execution,
    };
    artifacts.final_report = merge_reports(&artifacts);
    artifacts
}

enum ExecError {
    Spec(RlSpecError),
    Design(String),
}

/// The design the engine trains: the Robot Designer's design when present,
/// otherwise the exact optimum over the best available geometry.
pub fn execution_design(
    scenario: &TaskScenario,
    analysis: Option<&TaskAnalysisReport>,
    design: Option<&RobotDesignReport>,
    margin: f64,
) -> Result<RobotDesign, String> {
    let targets = analysis.map(|a| a.targets.clone()).unwrap_or_else(|| scenario.targets.clone());
    match design {
        Some(report) => {
            let (design, unassigned) = design_from_report(report, &targets, margin);
            if design.robots.iter().all(|r| r.targets.is_empty()) {
                return Err("no target is assigned to any robot".into());
            }
            if !unassigned.is_empty() {
                log::warn!("{} targets are not assigned to any robot", unassigned.len());
            }
            Ok(design)
        }
        None => {
            let problem = match analysis {
                Some(a) => DesignProblem::from_analysis(a, scenario.max_links_per_robot),
                None => DesignProblem::from_scenario(scenario),
            };
            design_robots(&problem, margin).map_err(|e| e.to_string())
        }
    }
}

fn execute(
    scenario: &TaskScenario,
    analysis: Option<&TaskAnalysisReport>,
    design: Option<&RobotDesignReport>,
    rl: &RlDesignReport,
    options: &RunOptions,
) -> Result<Option<ExecutionOutcome>, ExecError> {
    let design = execution_design(scenario, analysis, design, options.margin).map_err(ExecError::Design)?;
    let mut specs = parse_rlspec(rl, &design).map_err(ExecError::Spec)?;
    if !options.execute {
        return Ok(None);
    }
    if let Some(e) = options.episodes {
        specs.iter_mut().for_each(|s| s.episodes = e);
    }
    Ok(Some(ExecutionOutcome::train(design, specs)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_names_round_trip() {
        for c in ["C1", "C2", "C3", "C12", "C13", "C23", "Short", "Normal", "Long"] {
            assert_eq!(AblationConfig::from_condition(c).unwrap().condition_name(), c);
        }
        assert!(AblationConfig::from_condition("C4").is_err());
        assert!(AblationConfig::from_condition("C11").is_err());
        assert!(AblationConfig::from_condition("C123").is_err());
        let c13 = AblationConfig::from_condition("C13").unwrap();
        assert!(!c13.is_enabled(Agent::TaskAnalyst) && !c13.is_enabled(Agent::RlDesigner));
    }

    #[test]
    fn notices_prefix_text() {
        let t = with_notices("body", &[Stage::Analysis, Stage::Design]);
        assert_eq!(t, "UPSTREAM STAGE ABSENT: Analysis\nUPSTREAM STAGE ABSENT: Design\n\nbody");
        assert_eq!(with_notices("body", &[]), "body");
    }

    #[test]
    fn agent_names_parse() {
        assert_eq!("rl_designer".parse::<Agent>().unwrap(), Agent::RlDesigner);
        assert_eq!("Task-Analyst".parse::<Agent>().unwrap(), Agent::TaskAnalyst);
        assert!("pilot".parse::<Agent>().is_err());
    }
}
