use autorobo_core::eval::{score_run, shipped_fixture_dir, STUB_ENDPOINT};
use autorobo_core::gateway::{Gateway, GatewayMode};
use autorobo_core::pipeline::{
    run_pipeline_with, AblationConfig, Agent, PipelineArtifacts, RunOptions, Stage, StageOutcome, ABSENT_NOTICE,
};
use autorobo_core::scenario::{example_scenario, find_builtin, render_description, DescriptionLength};

fn stub() -> Gateway {
    Gateway::new(GatewayMode::Live { endpoint: STUB_ENDPOINT.into(), credential_env: None }).unwrap()
}

fn quick() -> RunOptions {
    RunOptions { episodes: Some(12), ..RunOptions::default() }
}

fn run(scenario_id: &str, condition: &str) -> PipelineArtifacts {
    let scenario = if scenario_id == "example" { example_scenario() } else { find_builtin(scenario_id).unwrap() };
    run_pipeline_with(&scenario, &AblationConfig::from_condition(condition).unwrap(), &stub(), "stub-ppo", &quick())
}

fn outcomes(a: &PipelineArtifacts) -> Vec<&'static str> {
    a.status
        .stages
        .iter()
        .map(|(_, o)| match o {
            StageOutcome::Completed => "C",
            StageOutcome::Skipped => "S",
            StageOutcome::Failed(_) => "F",
        })
        .collect()
}

#[test]
fn full_run_completes_every_stage() {
    let a = run("1", "Normal");
    assert_eq!(outcomes(&a), ["C"; 5], "{:?}", a.status);
    assert!(a.program_files().count() >= 3);
    let names: Vec<_> = a.program_files().map(|c| c.filename.as_str()).collect();
    assert_eq!(names, ["env.py", "train.py", "eval.py"]);
    assert!(!a.final_report.contains("```"));
    assert!(a.final_report.contains("[code artifact: env.py]"));
    assert_eq!(a.transcript.len(), 3);
    let exec = a.execution.as_ref().unwrap();
    assert_eq!(exec.results.len(), 1);
    assert_eq!(exec.results[0].learning_curve.len(), 12);
}

#[test]
fn each_agent_sees_only_its_predecessor() {
    let a = run("4", "Normal");
    assert_eq!(a.transcript[0].request.user_content(), a.description);
    for pair in a.transcript.windows(2) {
        let upstream = &pair[0].response.as_ref().unwrap().content;
        assert_eq!(pair[1].request.user_content(), upstream);
    }
}

#[test]
fn disable_conditions_force_stage_patterns() {
    let expected = [
        ("C1", ["S", "C", "C", "C", "C"]),
        ("C2", ["C", "S", "C", "C", "C"]),
        ("C3", ["C", "C", "S", "S", "S"]),
        ("C12", ["S", "S", "C", "C", "C"]),
        ("C13", ["S", "C", "S", "S", "S"]),
        ("C23", ["C", "S", "S", "S", "S"]),
    ];
    for (cond, pattern) in expected {
        let a = run("example", cond);
        assert_eq!(outcomes(&a), pattern, "{cond}: {:?}", a.status);
        assert_eq!(a.transcript.len(), 3 - AblationConfig::from_condition(cond).unwrap().disabled.len());
    }
}

#[test]
fn rl_designer_off_leaves_no_code() {
    let a = run("1", "C3");
    assert!(a.code_files.is_empty());
    assert!(a.rl.is_none() && a.execution.is_none());
    assert_eq!(*a.status.get(Stage::Execution), StageOutcome::Skipped);
    let card = score_run(&a, "C3");
    assert_eq!((card.tcp, card.cef, card.ma), (2.0, 0.0, 0.0));
}

#[test]
fn pair_disable_passes_description_with_two_notices() {
    let a = run("1", "C12");
    assert_eq!(a.transcript.len(), 1);
    assert_eq!(a.transcript[0].agent, Agent::RlDesigner);
    let input = a.transcript[0].request.user_content();
    let scenario = find_builtin("1").unwrap();
    assert!(input.contains(&render_description(&scenario, DescriptionLength::Normal)));
    assert_eq!(input.matches(ABSENT_NOTICE).count(), 2);
    assert!(input.starts_with("UPSTREAM STAGE ABSENT: Analysis\nUPSTREAM STAGE ABSENT: Design\n"));
}

#[test]
fn analysis_only_report_is_header_plus_analysis() {
    let a = run("1", "C23");
    assert!(a.final_report.starts_with("# Final Report"));
    assert!(a.final_report.contains("Number of Targets to be Reached"));
    assert!(!a.final_report.contains("Required Number of Robots"));
    let card = score_run(&a, "C23");
    assert!(card.rm <= 2.0);
}

#[test]
fn short_description_still_runs_every_stage() {
    let a = run("example", "Short");
    assert_eq!(outcomes(&a), ["C"; 5], "{:?}", a.status);
}

#[test]
fn full_run_scores() {
    let a = run("1", "Normal");
    let card = score_run(&a, "1");
    assert_eq!(card.tcp, 5.0);
    assert_eq!(card.cef, 5.0);
    assert_eq!(card.rda, 5.0);
    assert_eq!(card.rm, 5.0);
}

/// Clears the fields that measure wall-clock time.
fn without_timing(mut a: PipelineArtifacts) -> PipelineArtifacts {
    for e in &mut a.transcript {
        if let Some(r) = e.response.as_mut() {
            r.latency_ms = 0;
        }
    }
    if let Some(x) = a.execution.as_mut() {
        for r in &mut x.results {
            r.wall_time = 0.0;
        }
    }
    a
}

#[test]
fn replay_runs_are_reproducible() {
    let replay = Gateway::new(GatewayMode::Replay { fixture_dir: shipped_fixture_dir() }).unwrap();
    let scenario = find_builtin("1").unwrap();
    let go =
        |g: &Gateway| without_timing(run_pipeline_with(&scenario, &AblationConfig::default(), g, "stub-ppo", &quick()));
    let a = go(&replay);
    assert_eq!(a, go(&replay));
    assert_eq!(a, go(&stub()));
}
