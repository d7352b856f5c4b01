//! Inputs shared by the criterion benchmarks in `benches/`.

use autorobo_core::arm::{design_robots, DesignProblem, RobotDesign, DEFAULT_MARGIN};
use autorobo_core::rl::RlSpec;
use autorobo_core::scenario::builtin_scenarios;

/// Design problem of built-in row `index` (0-based).
pub fn fixture_problem(index: usize) -> DesignProblem {
    DesignProblem::from_scenario(&builtin_scenarios()[index])
}

/// Oracle design of built-in row `index` at the default margin.
pub fn fixture_design(index: usize) -> RobotDesign {
    design_robots(&fixture_problem(index), DEFAULT_MARGIN).expect("built-in rows are feasible")
}

/// Training spec of the first robot of built-in row `index`.
pub fn fixture_spec(index: usize, episodes: usize) -> RlSpec {
    let mut spec = RlSpec::for_design(&fixture_design(index)).remove(0);
    spec.episodes = episodes;
    spec
}

/// A reply in the shape the RL designer returns: prose, an rlspec block and
/// three program files.
pub fn sample_reply() -> String {
    let mut s = String::from("## 1. Algorithm\n\nPPO with a small Gaussian policy.\n\n");
    s.push_str("```rlspec\nalgorithm: PPO\nepisodes: 300\n```\n\n");
    for name in ["env.py", "train.py", "eval.py"] {
        s.push_str(&format!("**{name}**\n\n```python\n"));
        for k in 0..40 {
            s.push_str(&format!("value_{k} = {k} * 2\n"));
        }
        s.push_str("```\n\n");
    }
    s
}
