//! Deterministic in-process provider for `stub://` endpoints.
//!
//! It answers the three agent prompts with well-formed reports computed from
//! the request text alone: the task analyst reads the scenario prose, the
//! robot designer runs the exact design search over the analysis, and the RL
//! designer writes the training set-up for that design. Responses depend only
//! on the request, so recording against the stub is reproducible. The model id
//! picks the declared RL algorithm (`sac` or `cem` in the id, else PPO).

use super::transport::{HttpReply, Transport, TransportError};
use crate::arm::{design_robots, DesignProblem, RobotDesign, DEFAULT_MARGIN};
use crate::geometry::{fmt_num, Point2};
use crate::report::{parse_robot_design, parse_task_analysis, scan_lengths, scan_points, Algorithm};
use crate::rl::spec::{
    DEFAULT_ACTION_LIMIT, DEFAULT_DT, DEFAULT_EPISODES, DEFAULT_EPSILON, DEFAULT_MAX_STEPS, DEFAULT_SEED,
};
use crate::rl::RewardWeights;
use crate::scenario::DEFAULT_MAX_LINKS;
use std::fmt::Write;

/// Role lines the pipeline prompts open with; the stub dispatches on them.
pub const TASK_ANALYST_ROLE: &str = "You are the Task Analyst";
pub const ROBOT_DESIGNER_ROLE: &str = "You are the Robot Designer";
pub const RL_DESIGNER_ROLE: &str = "You are the RL Designer";

#[derive(Debug, Clone, Copy, Default)]
pub struct StubProvider;

impl Transport for StubProvider {
    fn post(&self, _url: &str, _headers: &[(String, String)], body: &str) -> Result<HttpReply, TransportError> {
        let request: serde_json::Value = match serde_json::from_str(body) {
            Ok(v) => v,
            Err(e) => return Ok(reply(400, format!("invalid JSON body: {e}"))),
        };
        let model = request["model"].as_str().unwrap_or("stub").to_string();
        let messages = request["messages"].as_array().cloned().unwrap_or_default();
        let content_of = |role: &str| {
            messages
                .iter()
                .filter(|m| m["role"] == role)
                .filter_map(|m| m["content"].as_str())
                .next_back()
                .unwrap_or("")
                .to_string()
        };
        let system = content_of("system");
        let user = content_of("user");
        let answer = if system.starts_with(TASK_ANALYST_ROLE) {
            analyst_reply(&user)
        } else if system.starts_with(ROBOT_DESIGNER_ROLE) {
            designer_reply(&user)
        } else if system.starts_with(RL_DESIGNER_ROLE) {
            rl_reply(&user, &model)
        } else {
            "I can only act as one of the three pipeline agents.".to_string()
        };
        let completion = serde_json::json!({
            "model": model,
            "choices": [{"index": 0, "message": {"role": "assistant", "content": answer}}],
            "usage": {
                "prompt_tokens": (system.split_whitespace().count() + user.split_whitespace().count()) as u64,
                "completion_tokens": answer.split_whitespace().count() as u64,
            },
        });
        Ok(reply(200, completion.to_string()))
    }
}

fn reply(status: u16, body: String) -> HttpReply {
    HttpReply { status, body }
}

/// Task geometry as the stub understands it.
#[derive(Debug, Clone, PartialEq)]
struct Task {
    bases: Vec<Point2>,
    targets: Vec<Point2>,
    links: Vec<f64>,
    max_links: usize,
    /// True when nothing could be read from the prose.
    assumed: bool,
}

impl Task {
    fn problem(&self) -> DesignProblem {
        DesignProblem {
            base_options: self.bases.clone(),
            targets: self.targets.clone(),
            link_options: self.links.clone(),
            max_links: self.max_links,
        }
    }
}

fn sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let chars: Vec<char> = text.chars().collect();
    for (i, c) in chars.iter().enumerate() {
        current.push(*c);
        let at_end = i + 1 == chars.len() || chars[i + 1].is_whitespace();
        if (*c == '.' || *c == '\n') && at_end {
            out.push(std::mem::take(&mut current));
        }
    }
    out.push(current);
    out.into_iter().filter(|s| !s.trim().is_empty()).collect()
}

const NUMBER_WORDS: [&str; 11] =
    ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"];

fn max_links_from(text: &str) -> Option<usize> {
    let lower = text.to_lowercase();
    let idx = lower.find("up to ")?;
    let word = lower[idx + 6..].split_whitespace().next()?;
    NUMBER_WORDS.iter().position(|w| *w == word).or_else(|| word.parse().ok())
}

/// Reads bases, targets and link lengths from scenario prose, one sentence
/// at a time; falls back to a generic single-arm assumption.
fn read_description(text: &str) -> Task {
    let mut bases = Vec::new();
    let mut targets = Vec::new();
    let mut links = Vec::new();
    let mut max_links = DEFAULT_MAX_LINKS;
    for s in sentences(text) {
        let lower = s.to_lowercase();
        let points = scan_points(&s);
        if lower.contains("base") && !points.is_empty() && bases.is_empty() {
            bases = points;
        } else if lower.contains("target") && !points.is_empty() && targets.is_empty() {
            targets = points;
        } else if lower.contains("length") && links.is_empty() {
            links = scan_lengths(&s);
        }
        if lower.contains("up to") {
            max_links = max_links_from(&s).filter(|n| *n >= 1).unwrap_or(max_links);
        }
    }
    let assumed = bases.is_empty() || targets.is_empty() || links.is_empty();
    if assumed {
        // nothing concrete given: one arm at the origin, a nominal target
        return Task {
            bases: vec![Point2::ORIGIN],
            targets: vec![Point2::new(1.0, 0.5)],
            links: vec![1.0, 0.5],
            max_links,
            assumed,
        };
    }
    Task { bases, targets, links, max_links, assumed }
}

fn read_analysis(text: &str) -> Task {
    match parse_task_analysis(text) {
        Ok(a) => Task {
            bases: a.base_options,
            targets: a.targets,
            links: a.link_options,
            max_links: max_links_from(&a.arm_choices_notes).unwrap_or(DEFAULT_MAX_LINKS),
            assumed: false,
        },
        Err(_) => read_description(text),
    }
}

fn points(list: &[Point2]) -> String {
    list.iter().map(Point2::to_string).collect::<Vec<_>>().join(", ")
}

fn lengths(list: &[f64]) -> String {
    list.iter().map(|l| format!("{} m", fmt_num(*l))).collect::<Vec<_>>().join(", ")
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn analyst_reply(description: &str) -> String {
    let task = read_description(description);
    let robots = design_robots(&task.problem(), DEFAULT_MARGIN).map(|d| d.robots.len()).unwrap_or(1);
    let mut out = String::from("# Task Analysis Report\n\n");
    let _ = writeln!(out, "## 1. Number of Targets to be Reached\n");
    let _ = writeln!(out, "There are {}: {}.\n", plural(task.targets.len(), "target"), points(&task.targets));
    let _ = writeln!(out, "## 2. Number of Robots to be Built\n");
    let _ = writeln!(
        out,
        "{} should be built. At most one robot fits on each base location, so the count never exceeds the {} available.\n",
        plural(robots, "robot"),
        plural(task.bases.len(), "base location")
    );
    let _ = writeln!(out, "## 3. Base Location Options\n");
    let _ = writeln!(out, "Candidate bases: {}.", points(&task.bases));
    let _ = writeln!(
        out,
        "All positions are expressed in one planar frame in meters, with the origin and axes as given in the task statement.\n"
    );
    let _ = writeln!(out, "## 4. Arm Link Length Options\n");
    let _ = writeln!(out, "Available links: {}, kept exactly as specified.\n", lengths(&task.links));
    let _ = writeln!(out, "## 5. Arm Choices Information\n");
    let _ = writeln!(
        out,
        "Each arm is a planar serial chain of revolute joints that may combine up to {} links, repeating a length if useful.",
        task.max_links
    );
    if task.assumed {
        let _ = writeln!(
            out,
            "The task statement gives no geometry, so a single base at the origin, one nominal target and two link sizes are assumed."
        );
    }
    out
}

fn design_section(design: &RobotDesign) -> String {
    let mut out = String::from("# Robot Design Report\n\n");
    let n = design.robots.len();
    let _ = writeln!(
        out,
        "## 1. Required Number of Robots\n\n{} {} required.\n",
        plural(n, "robot"),
        if n == 1 { "is" } else { "are" }
    );
    let _ = writeln!(out, "## 2. Selected Base Location\n");
    for (i, r) in design.robots.iter().enumerate() {
        let _ = writeln!(out, "- Robot {}: base {}, targets {}", i + 1, r.arm.base, points(&design.robot_targets(i)));
    }
    let _ = writeln!(out, "\n## 3. Design Decisions for Robotic Arms\n");
    for (i, r) in design.robots.iter().enumerate() {
        let dists: Vec<f64> = design.robot_targets(i).iter().map(|t| t.distance(&r.arm.base)).collect();
        let near = dists.iter().cloned().fold(f64::INFINITY, f64::min);
        let far = dists.iter().cloned().fold(0.0, f64::max);
        let (inner, outer) = r.arm.reach();
        let _ = writeln!(
            out,
            "Robot {} must cover target distances between {:.3} and {:.3} from its base. The chosen chain spans an annulus from {:.3} to {:.3}, which keeps {:.0}% spare reach beyond the farthest target without adding a longer link than needed; a cheaper chain from the options would leave a target out of reach, and a redundant extra link would add cost without benefit.",
            i + 1,
            near,
            far,
            inner,
            outer,
            design.margin * 100.0
        );
    }
    let _ = writeln!(out, "\n## 4. Final Robotic Arm Configuration\n");
    for (i, r) in design.robots.iter().enumerate() {
        let _ = writeln!(out, "- Robot {}: {}", i + 1, lengths(&r.arm.links));
    }
    let _ = writeln!(out, "\n## 5. Summary\n");
    let _ = writeln!(
        out,
        "The design uses {} with {} in total and a combined link length of {}. Every target is assigned to exactly one robot and lies inside that robot's reachable ring.",
        plural(n, "robot"),
        plural(design.link_count(), "link"),
        fmt_num((design.total_cost * 1e9).round() / 1e9)
    );
    out
}

fn designer_reply(analysis: &str) -> String {
    let task = read_analysis(analysis);
    match design_robots(&task.problem(), DEFAULT_MARGIN) {
        Ok(design) => design_section(&design),
        Err(e) => {
            format!("# Robot Design Report\n\nNo arrangement of the available links reaches every target.\n\n{e}\n")
        }
    }
}

/// Recovers the design the RL designer works from: the design report if the
/// input is one, else the analysis or prose it would have been made from.
fn design_for_rl(input: &str) -> Option<RobotDesign> {
    if let Ok(report) = parse_robot_design(input) {
        let targets: Vec<Point2> = report.assigned_targets.iter().flatten().copied().collect();
        let mut robots = Vec::new();
        let mut next = 0;
        for (i, cfg) in report.arm_configurations.iter().enumerate() {
            let base = report.selected_bases.get(i).copied().unwrap_or(Point2::ORIGIN);
            let count = report.assigned_targets.get(i).map(Vec::len).unwrap_or(0);
            robots.push(crate::arm::RobotAssignment {
                arm: crate::arm::ArmConfiguration::new(cfg.links.clone(), base),
                targets: (next..next + count).collect(),
            });
            next += count;
        }
        if !targets.is_empty() {
            let total_cost = robots.iter().map(|r| r.arm.total_length()).sum();
            return Some(RobotDesign { robots, targets, total_cost, margin: DEFAULT_MARGIN });
        }
    }
    design_robots(&read_analysis(input).problem(), DEFAULT_MARGIN).ok()
}

fn declared_algorithm(model: &str) -> Algorithm {
    let m = model.to_lowercase();
    if m.contains("sac") {
        Algorithm::Sac
    } else if m.contains("cem") {
        Algorithm::Cem
    } else {
        Algorithm::Ppo
    }
}

fn rl_reply(input: &str, model: &str) -> String {
    let Some(design) = design_for_rl(input) else {
        return "# RL Design Report\n\nThe upstream design is not usable, so no training set-up can be given.\n"
            .to_string();
    };
    let algorithm = declared_algorithm(model);
    let w = RewardWeights::default();
    let n_max = design.robots.iter().map(|r| r.arm.links.len()).max().unwrap_or(1);
    let mut out = String::from("# RL Design Report\n\n");
    let _ = writeln!(out, "## 1. Environment Design\n");
    let _ = writeln!(
        out,
        "One goal-conditioned environment is built per robot. The state holds the relative joint angles and the active target; the observation gives the sine and cosine of each cumulative joint angle together with the tip-to-target offset and distance."
    );
    for (i, r) in design.robots.iter().enumerate() {
        let _ = writeln!(
            out,
            "- Robot {}: base {}, links {}, targets {}",
            i + 1,
            r.arm.base,
            lengths(&r.arm.links),
            points(&design.robot_targets(i))
        );
    }
    let _ = writeln!(out, "\n## 2. Motor Motion Definition\n");
    let _ = writeln!(
        out,
        "Each of the up to {n_max} joints is driven by a velocity command clipped to {} rad/s and integrated over a {} s control step.\n",
        fmt_num(DEFAULT_ACTION_LIMIT),
        fmt_num(DEFAULT_DT)
    );
    let _ = writeln!(out, "## 3. Reinforcement Learning Algorithm Selection\n");
    let _ = writeln!(out, "Algorithm: {algorithm}\n");
    let why = match algorithm {
        Algorithm::Sac => "SAC suits continuous joint commands and reuses experience through its entropy-regularized off-policy updates.",
        Algorithm::Cem => "The cross-entropy method searches policy parameters directly and needs no gradients, which is adequate for a small reaching policy.",
        _ => "PPO handles continuous joint commands with stable clipped policy updates and needs little tuning.",
    };
    let _ = writeln!(
        out,
        "{why} The reward is the negative tip distance weighted by {}, minus {} times the squared command, plus a bonus of {} on success.\n",
        fmt_num(w.distance),
        fmt_num(w.action_penalty),
        fmt_num(w.success_bonus)
    );
    let _ = writeln!(out, "## 4. Success and Failure Criteria\n");
    let _ = writeln!(
        out,
        "An episode succeeds once the tip is within {} m of the active target and fails when {} steps pass without that.\n",
        fmt_num(DEFAULT_EPSILON),
        DEFAULT_MAX_STEPS
    );
    let _ = writeln!(out, "## 5. Initial Conditions\n");
    let _ = writeln!(
        out,
        "Every episode starts from the straight arm with each joint perturbed uniformly within 0.05 rad; targets are cycled from one episode to the next.\n"
    );
    let _ = writeln!(out, "## Code Listings\n");
    let first = &design.robots[0];
    let _ = writeln!(
        out,
        "**env.py**\n\n```python\n{}```\n",
        env_py(&first.arm.links, first.arm.base, &design.robot_targets(0))
    );
    let _ = writeln!(out, "**train.py**\n\n```python\n{}```\n", train_py(&algorithm));
    let _ = writeln!(out, "**eval.py**\n\n```python\n{}```\n", EVAL_PY);
    let _ = writeln!(out, "```rlspec");
    let _ = writeln!(out, "algorithm: {algorithm}");
    let _ = writeln!(out, "episodes: {DEFAULT_EPISODES}");
    let _ = writeln!(out, "max_steps: {DEFAULT_MAX_STEPS}");
    let _ = writeln!(out, "dt: {}", fmt_num(DEFAULT_DT));
    let _ = writeln!(out, "success_epsilon: {}", fmt_num(DEFAULT_EPSILON));
    let _ = writeln!(out, "action_limit: {}", fmt_num(DEFAULT_ACTION_LIMIT));
    let _ = writeln!(
        out,
        "reward_weights: {}, {}, {}",
        fmt_num(w.distance),
        fmt_num(w.action_penalty),
        fmt_num(w.success_bonus)
    );
    let _ = writeln!(out, "seed: {DEFAULT_SEED}");
    if design.robots.len() == 1 {
        let _ = writeln!(out, "links: {}", lengths(&first.arm.links));
        let _ = writeln!(out, "base: {}", first.arm.base);
    }
    let _ = writeln!(out, "```");
    out
}

fn py_list(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", "))
}

fn env_py(links: &[f64], base: Point2, targets: &[Point2]) -> String {
    let targets: Vec<String> = targets.iter().map(|t| format!("({:?}, {:?})", t.x, t.y)).collect();
    format!(
        r#"import numpy as np
import gym
from gym import spaces

LINKS = {links}
BASE = ({bx:?}, {by:?})
TARGETS = [{targets}]


class ReachEnv(gym.Env):
    def __init__(self, dt={dt:?}, max_steps={max_steps}, eps={eps:?}):
        n = len(LINKS)
        self.dt, self.max_steps, self.eps = dt, max_steps, eps
        self.action_space = spaces.Box(-{lim:?}, {lim:?}, shape=(n,))
        self.observation_space = spaces.Box(-np.inf, np.inf, shape=(2 * n + 3,))
        self.target = 0

    def tip(self):
        angle, x, y = 0.0, BASE[0], BASE[1]
        for length, theta in zip(LINKS, self.theta):
            angle += theta
            x += length * np.cos(angle)
            y += length * np.sin(angle)
        return np.array([x, y])

    def obs(self):
        cum = np.cumsum(self.theta)
        delta = np.array(TARGETS[self.target]) - self.tip()
        trig = np.stack([np.sin(cum), np.cos(cum)], axis=1).ravel()
        return np.concatenate([trig, delta, [np.linalg.norm(delta)]])

    def reset(self, target=None):
        self.target = (self.target + 1) % len(TARGETS) if target is None else target
        self.theta = np.random.uniform(-0.05, 0.05, len(LINKS))
        self.steps = 0
        return self.obs()

    def step(self, action):
        action = np.clip(action, -{lim:?}, {lim:?})
        self.theta = self.theta + action * self.dt
        self.steps += 1
        d = np.linalg.norm(np.array(TARGETS[self.target]) - self.tip())
        reward = -d - 0.01 * float(action @ action)
        done = d < self.eps
        if done:
            reward += 10.0
        return self.obs(), reward, done or self.steps >= self.max_steps, {{"success": done}}
"#,
        links = py_list(links),
        bx = base.x,
        by = base.y,
        targets = targets.join(", "),
        dt = DEFAULT_DT,
        max_steps = DEFAULT_MAX_STEPS,
        eps = DEFAULT_EPSILON,
        lim = DEFAULT_ACTION_LIMIT,
    )
}

fn train_py(algorithm: &Algorithm) -> String {
    let class = match algorithm {
        Algorithm::Sac => "SAC",
        _ => "PPO",
    };
    format!(
        r#"from stable_baselines3 import {class}
from env import ReachEnv

env = ReachEnv()
model = {class}("MlpPolicy", env, seed={seed}, verbose=1)
model.learn(total_timesteps={steps})
model.save("reach_policy")
"#,
        seed = DEFAULT_SEED,
        steps = DEFAULT_EPISODES * DEFAULT_MAX_STEPS,
    )
}

const EVAL_PY: &str = r#"import numpy as np
from stable_baselines3.common.base_class import BaseAlgorithm
from env import ReachEnv, TARGETS


def evaluate(model: BaseAlgorithm):
    env = ReachEnv()
    for k in range(len(TARGETS)):
        obs, done, path = env.reset(target=k), False, []
        while not done:
            action, _ = model.predict(obs, deterministic=True)
            obs, reward, done, info = env.step(action)
            path.append(env.tip())
        print(k, "success" if info["success"] else "timeout", np.round(path[-1], 3))
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{parse_rl_design, parse_robot_design};
    use crate::scenario::{builtin_scenarios, render_description, DescriptionLength};

    #[test]
    fn reads_rendered_descriptions() {
        for s in builtin_scenarios() {
            for level in [DescriptionLength::Normal, DescriptionLength::Long] {
                let task = read_description(&render_description(&s, level));
                assert_eq!(task.bases, s.base_options, "{} {level:?}", s.id);
                assert_eq!(task.targets, s.targets);
                assert_eq!(task.links, s.link_options);
                assert_eq!(task.max_links, 3);
            }
        }
        let short = read_description(&render_description(&builtin_scenarios()[0], DescriptionLength::Short));
        assert!(short.assumed);
    }

    #[test]
    fn chained_replies_parse() {
        let s = &builtin_scenarios()[0];
        let analysis = analyst_reply(&render_description(s, DescriptionLength::Normal));
        let a = parse_task_analysis(&analysis).unwrap();
        assert_eq!(a.targets, s.targets);
        assert_eq!(a.base_options, s.base_options);
        let design = designer_reply(&analysis);
        let d = parse_robot_design(&design).unwrap();
        assert_eq!(d.required_robots, 1);
        assert_eq!(d.arm_configurations[0].links, vec![1.0, 0.8]);
        let rl = parse_rl_design(&rl_reply(&design, "stub-sac")).unwrap();
        assert_eq!(rl.algorithm, Algorithm::Sac);
        assert_eq!(rl.code_blocks.iter().filter(|c| !c.is_rlspec()).count(), 3);
        assert!(rl.rlspec.is_some());
    }
}
