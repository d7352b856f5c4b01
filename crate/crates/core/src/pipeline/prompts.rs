//! Prompt construction for the three core agents.

use crate::gateway::stub::{RL_DESIGNER_ROLE, ROBOT_DESIGNER_ROLE, TASK_ANALYST_ROLE};
use crate::gateway::{ChatMessage, ChatRequest};
use crate::report::{RL_DESIGN_HEADINGS, ROBOT_DESIGN_HEADINGS, TASK_ANALYSIS_HEADINGS};

fn numbered(headings: &[&str]) -> String {
    headings.iter().enumerate().map(|(i, h)| format!("## {}. {h}", i + 1)).collect::<Vec<_>>().join("\n")
}

fn request(model_id: &str, system: String, user: &str) -> ChatRequest {
    ChatRequest::new(model_id, vec![ChatMessage::system(system), ChatMessage::user(user)])
}

pub fn task_analyst_prompt(model_id: &str, description: &str) -> ChatRequest {
    assert!(!description.trim().is_empty(), "description must be non-empty");
    let system = format!(
        "{TASK_ANALYST_ROLE}, the engineering-analysis agent at the start of a robot design pipeline. \
Read the task scenario and produce a structured analysis for the Robot Designer.

Your duties:
1. Identify every target point the robots must reach and decide how many robots need to be built.
2. Establish one planar coordinate frame for the task and convert all positional data (base locations and targets) into that frame, stating coordinates in meters as (x, y).
3. Record the available base locations and the arm link length options. Keep the link length options exactly as given, without modification.

Answer in Markdown with exactly these five numbered sections:
{headings}

Under \"Number of Targets to be Reached\" list every target as (x, y). Under \"Base Location Options\" list every candidate base as (x, y). Under \"Arm Link Length Options\" list each length with the unit m. Under \"Arm Choices Information\" state how many links one arm may combine.",
        headings = numbered(&TASK_ANALYSIS_HEADINGS),
    );
    request(model_id, system, description)
}

pub fn robot_designer_prompt(model_id: &str, analysis_markdown: &str) -> ChatRequest {
    assert!(!analysis_markdown.trim().is_empty(), "analysis must be non-empty");
    let system = format!(
        "{ROBOT_DESIGNER_ROLE}, the mechanical design agent of a robot design pipeline. \
You receive the Task Analyst's report and decide the robot hardware.

Your tasks:
1. Decide the required number of robots.
2. Select a base location for each robot from the base options and assign every target to exactly one robot.
3. Choose each arm's link lengths from the link length options (a length may repeat) so that the arm can reach all of its assigned targets with a small safety margin.
4. Justify the choice with economic and redundancy considerations: links should be no longer than necessary, to limit cost and keep the workspace safe, yet never too short to reach a target.

Answer in Markdown with exactly these five numbered sections:
{headings}

In \"Selected Base Location\" write one line per robot: `Robot k: base (x, y), targets (x1, y1), (x2, y2)`. \
In \"Final Robotic Arm Configuration\" write one line per robot listing its links from base to tip: `Robot k: L1 m, L2 m`. \
End with the \"Summary\" section.",
        headings = numbered(&ROBOT_DESIGN_HEADINGS),
    );
    request(model_id, system, analysis_markdown)
}

pub fn rl_designer_prompt(model_id: &str, design_markdown: &str) -> ChatRequest {
    assert!(!design_markdown.trim().is_empty(), "design must be non-empty");
    let system = format!(
        "{RL_DESIGNER_ROLE}, the reinforcement-learning agent of a robot design pipeline. \
You receive the Robot Designer's report and define how each arm learns to reach its targets.

Answer in Markdown with exactly these five numbered sections:
{headings}

Define states, actions and rewards in the environment design, describe how joint motors move, select a reinforcement learning algorithm and justify the choice (write `Algorithm: <name>`), give the success and failure criteria of an episode, and give the initial conditions.

Then provide three fenced Python code blocks, each preceded by its file name in bold: **env.py** (environment definition), **train.py** (training script) and **eval.py** (evaluation script).

Finally provide one fenced block tagged `rlspec` with `key: value` lines that fix the training set-up for execution: algorithm, episodes, max_steps, dt, success_epsilon, action_limit, reward_weights (distance weight, action penalty weight, success bonus; comma-separated), seed. \
The optional keys links and base must match the robot design when given.",
        headings = numbered(&RL_DESIGN_HEADINGS),
    );
    request(model_id, system, design_markdown)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyst_prompt_contents() {
        let r = task_analyst_prompt("m", "Pick boxes at (1, 2).");
        assert_eq!(r.user_content(), "Pick boxes at (1, 2).");
        for h in TASK_ANALYSIS_HEADINGS {
            assert!(r.system_content().contains(h), "{h}");
        }
        assert!(r.system_content().contains("convert all positional data"));
        assert!(r.system_content().contains("without modification"));
    }

    #[test]
    fn designer_prompt_contents() {
        let r = robot_designer_prompt("m", "# analysis");
        assert_eq!(r.user_content(), "# analysis");
        for h in ROBOT_DESIGN_HEADINGS {
            assert!(r.system_content().contains(h), "{h}");
        }
        let s = r.system_content();
        assert!(s.contains("reach all of its assigned targets"));
        assert!(s.contains("economic") && s.contains("redundancy"));
    }

    #[test]
    fn rl_prompt_contents() {
        let r = rl_designer_prompt("m", "# design");
        let s = r.system_content();
        for f in ["env.py", "train.py", "eval.py", "rlspec", "Success and Failure Criteria"] {
            assert!(s.contains(f), "{f}");
        }
        for k in
            ["algorithm", "episodes", "max_steps", "dt", "success_epsilon", "action_limit", "reward_weights", "seed"]
        {
            assert!(s.contains(k), "{k}");
        }
    }
}
