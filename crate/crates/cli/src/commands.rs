use crate::config::Config;
use crate::{AlgorithmArg, Cli, Command, Mode, StudyArg};
use anyhow::{anyhow, Context};
use autorobo_core::arm::{design_robots, DesignProblem, RobotDesign};
use autorobo_core::eval::{
    aggregate, apply_overrides, parse_overrides, run_ablation, run_generalization, score_run, scores_csv,
    summary_markdown, Metric, ScoreCard, ScoreMatrix, Study,
};
use autorobo_core::figures::emit_figures;
use autorobo_core::gateway::{Gateway, GatewayMode};
use autorobo_core::geometry::fmt_num;
use autorobo_core::pipeline::{
    run_pipeline_with, AblationConfig, Agent, ExecutionOutcome, PipelineArtifacts, RunOptions,
};
use autorobo_core::report::Algorithm;
use autorobo_core::rl::RlSpec;
use autorobo_core::rundir::{load_run, robot_prefix, write_figures, write_run_dir};
use autorobo_core::scenario::{builtin_scenarios, example_scenario, find_builtin, parse_scenario, DescriptionLength};
use autorobo_core::TaskScenario;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments: exit code 2.
    Usage(String),
    /// The command ran and failed: exit code 1.
    Run(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Run(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cli: Cli) -> Result<()> {
    let mut config = Config::load(cli.config.as_deref()).map_err(|e| CliError::Usage(format!("{e:#}")))?;
    if let Some(out) = cli.out {
        config.output_dir = out;
    }
    match cli.command {
        Command::Scenarios => scenarios(),
        Command::Run { scenario, model, mode, length, disable, episodes, no_execute } => {
            let scenario = resolve_scenario(&scenario)?;
            let length: DescriptionLength = length.parse().map_err(CliError::Usage)?;
            let agents = disable
                .iter()
                .filter(|a| !a.trim().is_empty())
                .map(|a| a.parse::<Agent>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(CliError::Usage)?;
            let ablation = AblationConfig::try_new(agents, length).map_err(CliError::Usage)?;
            let options = RunOptions { execute: !no_execute, margin: config.rl.margin, episodes };
            let model = model.unwrap_or_else(|| config.default_model().to_string());
            run(&config, &scenario, &ablation, mode, &model, &options)
        }
        Command::Design { scenario, margin } => {
            let scenario = resolve_scenario(&scenario)?;
            design(&scenario, margin.unwrap_or(config.rl.margin))
        }
        Command::Train { scenario, seed, episodes, algorithm, margin } => {
            let scenario = resolve_scenario(&scenario)?;
            let seed = seed.unwrap_or(config.rl.seed);
            let episodes = episodes.unwrap_or(config.rl.episodes);
            train(&config, &scenario, seed, episodes, algorithm, margin.unwrap_or(config.rl.margin))
        }
        Command::Bench { study, models, mode, episodes, overrides } => {
            let models = if models.is_empty() { config.models.clone() } else { models };
            bench(&config, study, &models, mode, episodes, overrides.as_deref())
        }
        Command::Report { run_id } => report(&run_dir(&config, &run_id)?),
        Command::Plot { run_id } => plot(&run_dir(&config, &run_id)?),
    }
}

fn resolve_scenario(arg: &str) -> Result<TaskScenario> {
    if arg.eq_ignore_ascii_case("example") {
        return Ok(example_scenario());
    }
    if let Some(s) = find_builtin(arg) {
        return Ok(s);
    }
    let path = Path::new(arg);
    if path.is_file() {
        let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {arg}: {e}")))?;
        return parse_scenario(&bytes).map_err(|e| CliError::Usage(format!("{arg}: {e}")));
    }
    Err(CliError::Usage(format!("unknown scenario `{arg}` (expected 1-10, `example`, or a scenario file)")))
}

fn run_dir(config: &Config, run_id: &str) -> Result<PathBuf> {
    let candidates = [config.output_dir.join(run_id), PathBuf::from(run_id)];
    candidates
        .into_iter()
        .find(|d| d.join(autorobo_core::rundir::ARTIFACTS_FILE).is_file())
        .ok_or_else(|| CliError::Usage(format!("no run `{run_id}` under {}", config.output_dir.display())))
}

fn gateway(config: &Config, mode: Mode) -> Result<Gateway> {
    let mode = match mode {
        Mode::Live => {
            GatewayMode::Live { endpoint: config.endpoint.clone(), credential_env: config.credential_env.clone() }
        }
        Mode::Record => GatewayMode::Record {
            endpoint: config.endpoint.clone(),
            credential_env: config.credential_env.clone(),
            fixture_dir: config.fixture_dir.clone(),
        },
        Mode::Replay => GatewayMode::Replay { fixture_dir: config.fixture_dir.clone() },
    };
    Gateway::new(mode).map_err(|e| CliError::Run(anyhow!(e)))
}

fn scenarios() -> Result<()> {
    for s in builtin_scenarios() {
        println!("{}\t{}", s.id, s.title);
    }
    Ok(())
}

fn score_line(card: &ScoreCard) -> String {
    Metric::ALL.iter().map(|m| format!("{} {}", m.label(), fmt_num(card.get(*m)))).collect::<Vec<_>>().join("  ")
}

fn run(
    config: &Config,
    scenario: &TaskScenario,
    ablation: &AblationConfig,
    mode: Mode,
    model: &str,
    options: &RunOptions,
) -> Result<()> {
    let gateway = gateway(config, mode)?;
    let artifacts = run_pipeline_with(scenario, ablation, &gateway, model, options);
    let card = score_run(&artifacts, &scenario.id);
    let dir = write_run_dir(&artifacts, &card, &config.output_dir).context("writing run directory")?;
    for (stage, outcome) in &artifacts.status.stages {
        println!("{:<15} {outcome}", stage.as_str());
    }
    println!("{}", score_line(&card));
    println!("run {} written to {}", artifacts.run_id(), dir.display());
    let failed: Vec<String> = artifacts
        .status
        .stages
        .iter()
        .filter(|(_, o)| matches!(o, autorobo_core::pipeline::StageOutcome::Failed(_)))
        .map(|(s, o)| format!("{}: {o}", s.as_str()))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Run(anyhow!("stage failure: {}", failed.join("; "))))
    }
}

fn print_design(design: &RobotDesign) {
    for (i, robot) in design.robots.iter().enumerate() {
        let links: Vec<String> = robot.arm.links.iter().map(|l| fmt_num(*l)).collect();
        let targets: Vec<String> = design.robot_targets(i).iter().map(|t| t.to_string()).collect();
        println!(
            "robot {}: base {}, links [{}], targets {}",
            i + 1,
            robot.arm.base,
            links.join(", "),
            targets.join(" ")
        );
    }
    println!("total cost {} m ({} links)", fmt_num(design.total_cost), design.link_count());
}

fn oracle_design(scenario: &TaskScenario, margin: f64) -> Result<RobotDesign> {
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err(CliError::Usage(format!("margin must be a finite value >= 0, got {margin}")));
    }
    design_robots(&DesignProblem::from_scenario(scenario), margin).map_err(|e| CliError::Run(anyhow!(e)))
}

fn design(scenario: &TaskScenario, margin: f64) -> Result<()> {
    let design = oracle_design(scenario, margin)?;
    println!("scenario {}: {} (margin {})", scenario.id, scenario.title, fmt_num(margin));
    print_design(&design);
    Ok(())
}

fn train(
    config: &Config,
    scenario: &TaskScenario,
    seed: u64,
    episodes: usize,
    algorithm: AlgorithmArg,
    margin: f64,
) -> Result<()> {
    let design = oracle_design(scenario, margin)?;
    let algorithm = match algorithm {
        AlgorithmArg::Ppo => Algorithm::Ppo,
        AlgorithmArg::Cem => Algorithm::Cem,
    };
    let name = format!("train_{}_{}_seed{seed}", scenario.id, algorithm.to_string().to_lowercase());
    let mut specs = RlSpec::for_design(&design);
    for spec in &mut specs {
        spec.seed = seed;
        spec.episodes = episodes;
        spec.algorithm = algorithm.clone();
    }
    print_design(&design);
    let outcome = ExecutionOutcome::train(design, specs);
    let dir = config.output_dir.join(&name);
    let mut failures = Vec::new();
    for (i, ((spec, result), trajs)) in
        outcome.specs.iter().zip(&outcome.results).zip(&outcome.trajectories).enumerate()
    {
        let paths = emit_figures(spec, &result.learning_curve, trajs, &dir.join("figures"), &robot_prefix(i))
            .context("writing figures")?;
        let distances: Vec<String> = trajs.iter().map(|t| format!("{:.4}", t.final_distance())).collect();
        println!(
            "robot {}: {} {} episodes, success {}/{}, final distances [{}], {:.1}s",
            i + 1,
            result.executed,
            result.learning_curve.len(),
            result.success.iter().filter(|s| **s).count(),
            result.success.len(),
            distances.join(", "),
            result.wall_time
        );
        for p in paths {
            println!("  {}", p.display());
        }
        if let Some(f) = &result.failure {
            failures.push(format!("robot {}: {f}", i + 1));
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Run(anyhow!("training failed: {}", failures.join("; "))))
    }
}

fn bench(
    config: &Config,
    study: StudyArg,
    models: &[String],
    mode: Mode,
    episodes: Option<usize>,
    overrides: Option<&Path>,
) -> Result<()> {
    let overrides = match overrides {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            Some(parse_overrides(&text).map_err(CliError::Usage)?)
        }
        None => None,
    };
    let gateway = gateway(config, mode)?;
    let options = RunOptions { execute: true, margin: config.rl.margin, episodes };
    let models: Vec<&str> = models.iter().map(String::as_str).collect();
    let out = config.output_dir.clone();
    let mut write_error = None;
    let mut on_run = |art: &PipelineArtifacts| {
        let case = match study {
            StudyArg::Generalization => art.scenario.id.clone(),
            StudyArg::Ablation => art.ablation.condition_name(),
        };
        log::info!("finished {}", art.run_id());
        if let Err(e) = write_run_dir(art, &score_run(art, &case), &out) {
            write_error.get_or_insert(e);
        }
    };
    let mut matrix: ScoreMatrix = match study {
        StudyArg::Generalization => run_generalization(&models, &gateway, &options, &mut on_run),
        StudyArg::Ablation => run_ablation(&models, &gateway, &options, &mut on_run),
    };
    if let Some(e) = write_error {
        return Err(CliError::Run(anyhow!(e)));
    }
    if let Some(overrides) = overrides {
        apply_overrides(&mut matrix.cards, &overrides).map_err(CliError::Usage)?;
        matrix.rows = match matrix.study {
            Study::Generalization => aggregate(&matrix.cards, |c| c.model.clone()),
            Study::Ablation => aggregate(&matrix.cards, |c| c.case.clone()),
        };
    }
    let name = match study {
        StudyArg::Generalization => "bench_generalization",
        StudyArg::Ablation => "bench_ablation",
    };
    let dir = out.join(name);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let summary = summary_markdown(&matrix);
    std::fs::write(dir.join("scores.csv"), scores_csv(&matrix.cards)).context("writing scores.csv")?;
    std::fs::write(dir.join("summary.md"), &summary).context("writing summary.md")?;
    print!("{summary}");
    println!("\nscore matrix written to {}", dir.display());
    Ok(())
}

fn report(dir: &Path) -> Result<()> {
    let artifacts = load_run(dir).map_err(|e| CliError::Run(anyhow!(e)))?;
    print!("{}", artifacts.final_report);
    let scores = dir.join(autorobo_core::rundir::SCORES_FILE);
    if let Ok(csv) = std::fs::read_to_string(&scores) {
        println!("\n{csv}");
    }
    Ok(())
}

fn plot(dir: &Path) -> Result<()> {
    let artifacts = load_run(dir).map_err(|e| CliError::Run(anyhow!(e)))?;
    let paths = write_figures(&artifacts, dir).map_err(|e| CliError::Run(anyhow!(e)))?;
    if paths.is_empty() {
        println!("run {} has no training results; nothing to plot", artifacts.run_id());
    }
    for p in paths {
        println!("{}", p.display());
    }
    Ok(())
}
