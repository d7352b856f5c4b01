//! End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero
//! exit when any criterion fails or exceeds its time budget.

use autorobo_core::arm::{
    design_robots, is_reachable, solve_ik, ArmConfiguration, DesignProblem, DEFAULT_MARGIN, IK_MAX_SWEEPS, IK_TOL,
};
use autorobo_core::eval::STUB_ENDPOINT;
use autorobo_core::eval::{count_fences, mean_sd};
use autorobo_core::figures::emit_figures;
use autorobo_core::gateway::{Gateway, GatewayMode};
use autorobo_core::oracle::{brute_force_design, sampled_reach_interval};
use autorobo_core::pipeline::{
    run_pipeline_with, AblationConfig, Agent, PipelineArtifacts, RunOptions, StageOutcome, ABSENT_NOTICE,
};
use autorobo_core::report::Algorithm;
use autorobo_core::rl::export::{learning_curve_csv, trajectories_csv};
use autorobo_core::rl::policy::gaussian_log_prob;
use autorobo_core::rl::ppo::{gradient_check, init_policy, SurrogateSample};
use autorobo_core::rl::{evaluate, train, RlSpec};
use autorobo_core::rundir::load_run;
use autorobo_core::scenario::{builtin_scenarios, example_scenario};
use autorobo_core::{DescriptionLength, Point2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

const BIN: &str = env!("CARGO_BIN_EXE_autorobo");

type Outcome = Result<String, String>;

/// Name, check and optional time budget of one criterion.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Independent transcription of the ten task rows: bases, targets, links.
#[allow(clippy::type_complexity)]
const TABLE: [(&[(f64, f64)], &[(f64, f64)], &[f64]); 10] = [
    (&[(0.0, 0.0), (0.5, 0.0)], &[(0.5, 1.2), (0.8, 1.5), (1.0, 1.0)], &[0.8, 1.0, 1.2]),
    (&[(0.0, 0.5), (0.2, 0.3)], &[(0.5, 0.5), (0.7, 0.7), (1.0, 0.6)], &[0.7, 0.9, 1.1]),
    (&[(0.0, -0.5), (-0.3, -0.5)], &[(0.4, 0.2), (0.5, 0.5), (0.6, 0.3)], &[0.6, 0.8, 1.0]),
    (&[(0.5, 0.0), (0.3, -0.2)], &[(0.5, 1.0), (0.6, 1.2), (0.8, 1.1)], &[0.9, 1.1, 1.3]),
    (&[(0.0, 0.0), (0.2, -0.2)], &[(0.3, 0.4), (0.5, 0.6), (0.7, 0.5)], &[0.7, 0.9, 1.2]),
    (&[(0.0, 0.0), (0.0, 0.3)], &[(0.4, 0.3), (0.6, 0.5), (0.8, 0.4)], &[0.8, 1.0, 1.2]),
    (&[(0.0, 0.0), (-0.5, 0.0)], &[(0.5, 1.0), (0.7, 1.2), (1.0, 1.1)], &[0.9, 1.1, 1.3]),
    (&[(0.0, 0.0), (1.2, 0.5)], &[(0.4, 0.2), (0.6, 0.3), (0.8, 0.4)], &[0.7, 0.9, 1.0]),
    (&[(0.0, 0.0), (0.2, 0.3)], &[(0.3, 0.4), (0.5, 0.5), (0.7, 0.6)], &[0.6, 0.8, 1.0]),
    (&[(0.0, 0.0), (0.5, 0.5)], &[(0.4, 0.5), (0.6, 0.7), (0.8, 1.0)], &[0.9, 1.2, 1.5]),
];

fn points(raw: &[(f64, f64)]) -> Vec<Point2> {
    raw.iter().map(|&(x, y)| Point2::new(x, y)).collect()
}

fn fixture_fidelity() -> Outcome {
    let builtins = builtin_scenarios();
    check(builtins.len() == 10, || format!("{} scenarios", builtins.len()))?;
    for (i, (s, (bases, targets, links))) in builtins.iter().zip(TABLE).enumerate() {
        check(s.id == (i + 1).to_string(), || format!("row {} has id {}", i + 1, s.id))?;
        check(s.base_options == points(bases), || format!("row {} bases {:?}", i + 1, s.base_options))?;
        check(s.targets == points(targets), || format!("row {} targets {:?}", i + 1, s.targets))?;
        check(s.link_options == links, || format!("row {} links {:?}", i + 1, s.link_options))?;
    }
    Ok("10 rows exact".into())
}

fn reachability_oracle() -> Outcome {
    const BAND: f64 = 1e-2;
    const GRID: usize = 2048;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut outside, mut inside, mut inside_disagree) = (0usize, 0usize, 0usize);
    for _ in 0..10_000 {
        let n = rng.random_range(1..=3);
        let links: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let base = Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let total: f64 = links.iter().sum();
        let d = rng.random_range(0.0..1.2) * total;
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let target = Point2::new(base.x + d * phi.cos(), base.y + d * phi.sin());
        let (lo, hi) = sampled_reach_interval(&links, GRID);
        let oracle = lo <= d && d <= hi;
        let fast = is_reachable(&ArmConfiguration::new(links.clone(), base), target, 0.0);
        if (d - lo).abs() < BAND || (d - hi).abs() < BAND {
            inside += 1;
            inside_disagree += usize::from(fast != oracle);
        } else {
            outside += 1;
            check(fast == oracle, || format!("disagreement outside the band: links {links:?}, d {d}"))?;
        }
    }
    let rate = if inside == 0 { 0.0 } else { inside_disagree as f64 / inside as f64 };
    check(rate < 0.01, || format!("{inside_disagree}/{inside} disagreements inside the band"))?;
    Ok(format!("{outside} outside agree, {inside_disagree}/{inside} inside disagree"))
}

fn design_optimality() -> Outcome {
    let mut checked = 0;
    for s in builtin_scenarios() {
        let problem = DesignProblem::from_scenario(&s);
        for margin in [0.0, DEFAULT_MARGIN] {
            let fast = design_robots(&problem, margin).map_err(|e| format!("row {}: {e}", s.id))?;
            let slow =
                brute_force_design(&problem, margin).ok_or_else(|| format!("row {}: no brute-force optimum", s.id))?;
            check((fast.total_cost - slow.cost).abs() < 1e-9, || {
                format!("row {} margin {margin}: cost {} vs {}", s.id, fast.total_cost, slow.cost)
            })?;
            check(slow.contains(&fast), || format!("row {} margin {margin}: design not among optima", s.id))?;
            checked += 1;
        }
    }
    for (row, base, links, cost) in
        [(0, Point2::new(0.5, 0.0), [0.8, 0.8], 1.6), (2, Point2::new(0.0, -0.5), [0.6, 0.6], 1.2)]
    {
        let d = design_robots(&DesignProblem::from_scenario(&builtin_scenarios()[row]), 0.0).unwrap();
        check(d.robots.len() == 1, || format!("row {}: {} robots", row + 1, d.robots.len()))?;
        let arm = &d.robots[0].arm;
        check(arm.base == base && arm.links == links && (d.total_cost - cost).abs() < 1e-12, || {
            format!("row {}: base {} links {:?} cost {}", row + 1, arm.base, arm.links, d.total_cost)
        })?;
    }
    Ok(format!("{checked} (row, margin) pairs equal brute force; rows 1 and 3 match"))
}

fn ik_certificate() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for s in builtin_scenarios() {
        for margin in [0.0, DEFAULT_MARGIN] {
            let d = design_robots(&DesignProblem::from_scenario(&s), margin).map_err(|e| e.to_string())?;
            for (i, robot) in d.robots.iter().enumerate() {
                for target in d.robot_targets(i) {
                    let sol = solve_ik(&robot.arm, target, IK_TOL, IK_MAX_SWEEPS);
                    check(sol.converged && sol.tip_error <= 1e-3, || format!("row {} target {target}: {sol:?}", s.id))?;
                    worst = worst.max(sol.tip_error);
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} targets, worst tip error {worst:.2e}"))
}

fn gradient_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n_links = rng.random_range(1..=3);
        let hidden: Vec<usize> = (0..rng.random_range(1..=2)).map(|_| rng.random_range(2..=8)).collect();
        let mut policy = init_policy(n_links, &hidden, rng.random_range(-1.0..0.5), &mut rng);
        policy.params = policy.net.init(&mut rng, 1.0);
        let batch: Vec<SurrogateSample> = (0..rng.random_range(1..=16))
            .map(|_| {
                let features: Vec<f64> = (0..policy.net.input_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let mean = policy.mean(&features);
                let action: Vec<f64> = mean.iter().map(|m| m + rng.random_range(-1.0..1.0)).collect();
                let lp = gaussian_log_prob(&mean, &policy.log_std, &action);
                SurrogateSample {
                    features,
                    action,
                    advantage: rng.random_range(-2.0..2.0),
                    old_log_prob: lp + rng.random_range(-0.5..0.5),
                }
            })
            .collect();
        let err = gradient_check(&policy, &batch, 0.2);
        check(err < 1e-4, || format!("relative error {err} for hidden {hidden:?}"))?;
        worst = worst.max(err);
    }
    Ok(format!("100 instances, worst relative error {worst:.2e}"))
}

fn oracle_spec(index: usize) -> RlSpec {
    let design = design_robots(&DesignProblem::from_scenario(&builtin_scenarios()[index]), DEFAULT_MARGIN).unwrap();
    RlSpec::for_design(&design).remove(0)
}

fn rl_convergence() -> Outcome {
    let mut per_fixture = Vec::new();
    for index in 0..10 {
        let wins = (0..10)
            .filter(|&seed| {
                let mut spec = oracle_spec(index);
                spec.seed = seed;
                train(&spec).all_success()
            })
            .count();
        check(wins >= 8, || format!("PPO fixture {}: {wins}/10 seeds", index + 1))?;
        per_fixture.push(wins.to_string());
    }
    let mut cem = Vec::new();
    for index in [0, 2, 8] {
        let wins = (0..10)
            .filter(|&seed| {
                let mut spec = oracle_spec(index);
                spec.seed = seed;
                spec.algorithm = Algorithm::Cem;
                train(&spec).all_success()
            })
            .count();
        check(wins >= 8, || format!("CEM fixture {}: {wins}/10 seeds", index + 1))?;
        cem.push(wins.to_string());
    }
    Ok(format!("PPO seeds won per fixture [{}], CEM on 1/3/9 [{}]", per_fixture.join(" "), cem.join(" ")))
}

fn cli(dir: &Path, args: &[&str]) -> Result<std::process::Output, String> {
    let o = Command::new(BIN).current_dir(dir).args(args).output().map_err(|e| e.to_string())?;
    check(o.status.success(), || {
        format!("{args:?} exited {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr))
    })?;
    Ok(o)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for out in ["a", "b"] {
        cli(dir.path(), &["--out", out, "train", "1", "--seed", "3"])?;
    }
    let read =
        |out: &str| std::fs::read(dir.path().join(out).join("train_1_ppo_seed3/figures/robot1_learning_curve.csv"));
    let (a, b) = (read("a").map_err(|e| e.to_string())?, read("b").map_err(|e| e.to_string())?);
    check(a == b, || "learning-curve CSVs differ".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

fn pipeline_replay() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    // an endpoint nothing listens on: replay must not need the network
    std::fs::write(dir.path().join("cfg.toml"), "endpoint = \"http://127.0.0.1:9/v1/chat/completions\"\n")
        .map_err(|e| e.to_string())?;
    cli(dir.path(), &["--config", "cfg.toml", "--out", "runs", "run", "1", "--mode", "replay"])?;
    let run = dir.path().join("runs/1_stub-ppo_Normal");
    let art = load_run(&run).map_err(|e| e.to_string())?;
    let tcp = art.status.completed_count();
    check(tcp == 5, || format!("TCP {tcp}: {:?}", art.status))?;
    let files = art.program_files().count();
    check(files >= 3, || format!("{files} code files"))?;
    let report = std::fs::read_to_string(run.join("final_report.md")).map_err(|e| e.to_string())?;
    let fences = count_fences(&report);
    check(fences == 0, || format!("{fences} fences in the final report"))?;
    Ok(format!("TCP {tcp}, {files} code files, {fences} fences"))
}

fn stub_run(condition: &AblationConfig) -> PipelineArtifacts {
    let gateway = Gateway::new(GatewayMode::Live { endpoint: STUB_ENDPOINT.into(), credential_env: None }).unwrap();
    let options = RunOptions { episodes: Some(4), ..RunOptions::default() };
    run_pipeline_with(&example_scenario(), condition, &gateway, "stub-ppo", &options)
}

fn pattern(a: &PipelineArtifacts) -> String {
    a.status
        .stages
        .iter()
        .map(|(_, o)| match o {
            StageOutcome::Completed => 'C',
            StageOutcome::Skipped => 'S',
            StageOutcome::Failed(_) => 'F',
        })
        .collect()
}

fn ablation_semantics() -> Outcome {
    let expected =
        [("C1", "SCCCC"), ("C2", "CSCCC"), ("C3", "CCSSS"), ("C12", "SSCCC"), ("C13", "SCSSS"), ("C23", "CSSSS")];
    let conditions = AblationConfig::disable_conditions();
    check(conditions.len() == 6, || format!("{} disable conditions", conditions.len()))?;
    for ((name, want), cond) in expected.iter().zip(&conditions) {
        check(cond.condition_name() == *name, || format!("condition {} where {name} expected", cond.condition_name()))?;
        let got = pattern(&stub_run(cond));
        check(got == *want, || format!("{name}: {got} instead of {want}"))?;
    }
    let c3 = stub_run(&AblationConfig::from_condition("C3")?);
    check(c3.status.completed_count() == 2, || format!("C3 TCP {}", c3.status.completed_count()))?;
    let c12 = stub_run(&AblationConfig::from_condition("C12")?);
    let notices = c12.transcript[0].request.user_content().matches(ABSENT_NOTICE).count();
    check(c12.transcript[0].agent == Agent::RlDesigner && notices == 2, || format!("C12 sent {notices} notices"))?;

    let subsets: Vec<Vec<Agent>> = vec![
        vec![],
        vec![Agent::TaskAnalyst],
        vec![Agent::RobotDesigner],
        vec![Agent::RlDesigner],
        vec![Agent::TaskAnalyst, Agent::RobotDesigner],
        vec![Agent::TaskAnalyst, Agent::RlDesigner],
        vec![Agent::RobotDesigner, Agent::RlDesigner],
    ];
    let tcp = |s: &Vec<Agent>| {
        stub_run(&AblationConfig::new(s.iter().copied(), DescriptionLength::Normal)).status.completed_count()
    };
    let scores: Vec<usize> = subsets.iter().map(tcp).collect();
    for (i, small) in subsets.iter().enumerate() {
        for (j, large) in subsets.iter().enumerate() {
            if small.iter().all(|a| large.contains(a)) {
                check(scores[j] <= scores[i], || format!("TCP rises from {small:?} to {large:?}"))?;
            }
        }
    }
    Ok("6 patterns forced, C3 TCP 2, C12 two notices, TCP monotone".into())
}

fn aggregation() -> Outcome {
    let mut values = vec![5.0, 4.0, 3.0, 5.0, 4.0, 4.0, 5.0, 3.0, 4.0, 5.0];
    let stat = mean_sd(&values);
    check((stat.mean - 4.2).abs() < 1e-12, || format!("mean {}", stat.mean))?;
    check((stat.sd - 0.789).abs() <= 1e-3, || format!("sd {}", stat.sd))?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        values.shuffle(&mut rng);
        check(mean_sd(&values) == stat, || format!("{values:?} changes the result"))?;
    }
    Ok(format!("mean {} sd {:.4}, stable over 100 shuffles", stat.mean, stat.sd))
}

fn figure_coherence() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut scenarios = builtin_scenarios();
    scenarios.push(example_scenario());
    let mut figures = 0;
    for s in &scenarios {
        let design = design_robots(&DesignProblem::from_scenario(s), DEFAULT_MARGIN).map_err(|e| e.to_string())?;
        for (i, mut spec) in RlSpec::for_design(&design).into_iter().enumerate() {
            spec.episodes = 20;
            let r = train(&spec);
            let trajs: Vec<_> = (0..spec.targets.len()).map(|t| evaluate(&r.policy, &spec, t)).collect();
            let prefix = format!("{}_{i}_", s.id);
            emit_figures(&spec, &r.learning_curve, &trajs, dir.path(), &prefix).map_err(|e| e.to_string())?;
            let read =
                |name: &str| std::fs::read(dir.path().join(format!("{prefix}{name}"))).map_err(|e| e.to_string());
            let curve = learning_curve_csv(&r.learning_curve).into_bytes();
            let table = trajectories_csv(&trajs).into_bytes();
            for (svg, csv, want) in [
                ("learning_curve.svg", "learning_curve.csv", &curve),
                ("motor_control.svg", "motor_control.csv", &table),
                ("tip_trajectory.svg", "tip_trajectory.csv", &table),
            ] {
                read(svg)?;
                check(read(csv)? == *want, || format!("{prefix}{csv} differs from the export"))?;
                figures += 1;
            }
            let tip = String::from_utf8(read("tip_trajectory.svg")?).map_err(|e| e.to_string())?;
            let markers = tip.matches("class=\"target-marker\"").count();
            check(markers == spec.targets.len(), || {
                format!("{prefix}: {markers} markers, {} targets", spec.targets.len())
            })?;
        }
    }
    Ok(format!("{figures} SVG/CSV pairs coherent"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("fixture fidelity", fixture_fidelity, Some(Duration::from_secs(1))),
        ("reachability oracle", reachability_oracle, Some(Duration::from_secs(120))),
        ("design optimality", design_optimality, Some(Duration::from_secs(30))),
        ("IK certificate", ik_certificate, Some(Duration::from_secs(10))),
        ("PPO gradient check", gradient_checks, Some(Duration::from_secs(60))),
        ("RL convergence", rl_convergence, Some(Duration::from_secs(20 * 60))),
        ("determinism", determinism, None),
        ("pipeline replay", pipeline_replay, Some(Duration::from_secs(30))),
        ("ablation semantics", ablation_semantics, None),
        ("aggregation", aggregation, None),
        ("figure/data coherence", figure_coherence, None),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = budget.filter(|b| elapsed > *b);
        let (verdict, detail) = match (&outcome, over) {
            (Ok(d), None) => ("PASS", d.clone()),
            (Ok(d), Some(b)) => ("FAIL", format!("{d}; exceeded the {:.0?} budget", b)),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!("{verdict} criterion {:>2} ({name}): {detail} [{:.2}s]", i + 1, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
