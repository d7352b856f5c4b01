use crate::arm::RobotDesign;
use crate::geometry::Point2;
use crate::report::{scan_lengths, scan_points, Algorithm, RlDesignReport, RlSpecBlock};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_MAX_STEPS: usize = 100;
pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_ACTION_LIMIT: f64 = 1.0;
pub const DEFAULT_EPISODES: usize = 300;
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub distance: f64,
    pub action_penalty: f64,
    pub success_bonus: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self { distance: 1.0, action_penalty: 0.01, success_bonus: 10.0 }
    }
}

/// Everything the native engine needs to train one robot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RlSpec {
    pub algorithm: Algorithm,
    pub links: Vec<f64>,
    pub base: Point2,
    pub targets: Vec<Point2>,
    pub dt: f64,
    pub max_steps: usize,
    pub success_epsilon: f64,
    pub action_limit: f64,
    pub reward_weights: RewardWeights,
    pub episodes: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub enum RlSpecError {
    #[error("RL design report has no rlspec block")]
    Missing,
    #[error("rlspec field `{field}`: {message}")]
    InvalidField { field: String, message: String },
    #[error("rlspec geometry contradicts the robot design: {}", .0.join(", "))]
    Inconsistent(Vec<String>),
    #[error("robot design has no robot with assigned targets")]
    EmptyDesign,
}

impl RlSpec {
    /// Default hyper-parameters for the given geometry.
    pub fn with_defaults(links: Vec<f64>, base: Point2, targets: Vec<Point2>) -> Self {
        Self {
            algorithm: Algorithm::Ppo,
            links,
            base,
            targets,
            dt: DEFAULT_DT,
            max_steps: DEFAULT_MAX_STEPS,
            success_epsilon: DEFAULT_EPSILON,
            action_limit: DEFAULT_ACTION_LIMIT,
            reward_weights: RewardWeights::default(),
            episodes: DEFAULT_EPISODES,
            seed: DEFAULT_SEED,
        }
    }

    /// One default spec per robot of a design.
    pub fn for_design(design: &RobotDesign) -> Vec<RlSpec> {
        design
            .robots
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.targets.is_empty())
            .map(|(i, r)| RlSpec::with_defaults(r.arm.links.clone(), r.arm.base, design.robot_targets(i)))
            .collect()
    }

    pub fn validate(&self) -> Result<(), RlSpecError> {
        let bad = |field: &str, message: &str| {
            Err(RlSpecError::InvalidField { field: field.into(), message: message.into() })
        };
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", "must be > 0");
        }
        if !(self.success_epsilon > 0.0 && self.success_epsilon.is_finite()) {
            return bad("success_epsilon", "must be > 0");
        }
        if self.max_steps == 0 {
            return bad("max_steps", "must be >= 1");
        }
        if !(self.action_limit > 0.0 && self.action_limit.is_finite()) {
            return bad("action_limit", "must be > 0");
        }
        if self.links.is_empty() || self.links.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return bad("links", "must be non-empty and positive");
        }
        if self.targets.is_empty() {
            return bad("targets", "must be non-empty");
        }
        Ok(())
    }

    pub fn total_reach(&self) -> f64 {
        self.links.iter().sum()
    }
}

fn field_err(field: &str, message: impl Into<String>) -> RlSpecError {
    RlSpecError::InvalidField { field: field.into(), message: message.into() }
}

fn parse_f64(block: &RlSpecBlock, key: &str) -> Result<Option<f64>, RlSpecError> {
    block
        .get(key)
        .map(|v| {
            let v = v.trim().trim_end_matches(|c: char| c.is_alphabetic() || c == '/').trim();
            v.parse::<f64>().map_err(|_| field_err(key, format!("not a number: {v}")))
        })
        .transpose()
}

fn parse_usize(block: &RlSpecBlock, key: &str) -> Result<Option<usize>, RlSpecError> {
    block
        .get(key)
        .map(|v| v.trim().replace('_', "").parse::<usize>().map_err(|_| field_err(key, format!("not an integer: {v}"))))
        .transpose()
}

fn parse_list(v: &str) -> Vec<f64> {
    v.split([',', ' ', '[', ']'])
        .filter(|s| !s.trim().is_empty())
        .filter_map(|s| s.trim().trim_end_matches('m').parse().ok())
        .collect()
}

fn same_links(a: &[f64], b: &[f64]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-9)
}

/// Combines the report's rlspec block with the design: one spec per robot
/// that has targets. Absent fields take the defaults; geometry comes from
/// the design, and any geometry the block states must agree with it.
pub fn parse_rlspec(report: &RlDesignReport, design: &RobotDesign) -> Result<Vec<RlSpec>, RlSpecError> {
    let block = report.rlspec.as_ref().ok_or(RlSpecError::Missing)?;
    let algorithm = block.get("algorithm").map(Algorithm::parse_name).unwrap_or(report.algorithm.clone());
    let reward_weights = match block.get("reward_weights") {
        Some(v) => match parse_list(v).as_slice() {
            [d, a, s] => RewardWeights { distance: *d, action_penalty: *a, success_bonus: *s },
            _ => return Err(field_err("reward_weights", "expected three comma-separated reals")),
        },
        None => RewardWeights::default(),
    };
    let dt = parse_f64(block, "dt")?.unwrap_or(DEFAULT_DT);
    let max_steps = parse_usize(block, "max_steps")?.unwrap_or(DEFAULT_MAX_STEPS);
    let success_epsilon = parse_f64(block, "success_epsilon")?.unwrap_or(DEFAULT_EPSILON);
    let action_limit = parse_f64(block, "action_limit")?.unwrap_or(DEFAULT_ACTION_LIMIT);
    let episodes = parse_usize(block, "episodes")?.unwrap_or(DEFAULT_EPISODES);
    let seed = parse_usize(block, "seed")?.map(|s| s as u64).unwrap_or(DEFAULT_SEED);

    let robots: Vec<usize> = (0..design.robots.len()).filter(|&i| !design.robots[i].targets.is_empty()).collect();
    if robots.is_empty() {
        return Err(RlSpecError::EmptyDesign);
    }

    // stated geometry must match at least one robot
    let stated_links = block.get("links").map(|v| {
        let l = scan_lengths(v);
        if l.is_empty() {
            parse_list(v)
        } else {
            l
        }
    });
    let stated_base = block.get("base").and_then(|v| scan_points(v).first().copied());
    let stated_targets = block.get("targets").map(scan_points);
    if stated_links.is_some() || stated_base.is_some() || stated_targets.is_some() {
        let mut mismatches = Vec::new();
        let matches = robots.iter().any(|&i| {
            let r = &design.robots[i];
            let mut ok = true;
            if let Some(l) = &stated_links {
                ok &= same_links(l, &r.arm.links);
            }
            if let Some(b) = &stated_base {
                ok &= b.distance(&r.arm.base) <= 1e-9;
            }
            if let Some(ts) = &stated_targets {
                let mine = design.robot_targets(i);
                ok &= ts.iter().all(|t| mine.iter().any(|m| m.distance(t) <= 1e-9));
            }
            ok
        });
        if !matches {
            if stated_links.is_some() {
                mismatches.push("links".to_string());
            }
            if stated_base.is_some() {
                mismatches.push("base".to_string());
            }
            if stated_targets.is_some() {
                mismatches.push("targets".to_string());
            }
            return Err(RlSpecError::Inconsistent(mismatches));
        }
    }

    let specs: Vec<RlSpec> = robots
        .iter()
        .enumerate()
        .map(|(k, &i)| RlSpec {
            algorithm: algorithm.clone(),
            links: design.robots[i].arm.links.clone(),
            base: design.robots[i].arm.base,
            targets: design.robot_targets(i),
            dt,
            max_steps,
            success_epsilon,
            action_limit,
            reward_weights,
            episodes,
            seed: seed + k as u64,
        })
        .collect();
    for s in &specs {
        s.validate()?;
    }
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm::{design_robots, DesignProblem};
    use crate::scenario::builtin_scenarios;

    fn report_with(block: &str) -> RlDesignReport {
        RlDesignReport {
            raw_markdown: String::new(),
            env_design: String::new(),
            motor_motion: String::new(),
            algorithm: Algorithm::Ppo,
            success_failure_criteria: String::new(),
            initial_conditions: String::new(),
            code_blocks: vec![],
            rlspec: Some(RlSpecBlock::parse(block)),
        }
    }

    fn row_one_design() -> RobotDesign {
        design_robots(&DesignProblem::from_scenario(&builtin_scenarios()[0]), 0.0).unwrap()
    }

    #[test]
    fn fills_from_design_and_defaults() {
        let specs = parse_rlspec(&report_with("algorithm: PPO\nepisodes: 300\n"), &row_one_design()).unwrap();
        assert_eq!(specs.len(), 1);
        let s = &specs[0];
        assert_eq!(s.links, vec![0.8, 0.8]);
        assert_eq!(s.targets.len(), 3);
        assert_eq!(s.algorithm, Algorithm::Ppo);
        assert_eq!(s.episodes, 300);
        assert_eq!(s.dt, DEFAULT_DT);
        assert_eq!(s.reward_weights, RewardWeights::default());
    }

    #[test]
    fn sac_is_kept_as_declared() {
        let specs = parse_rlspec(&report_with("algorithm: SAC"), &row_one_design()).unwrap();
        assert_eq!(specs[0].algorithm, Algorithm::Sac);
    }

    #[test]
    fn contradictory_links() {
        let err = parse_rlspec(&report_with("algorithm: PPO\nlinks: [9.9]"), &row_one_design()).unwrap_err();
        assert_eq!(err, RlSpecError::Inconsistent(vec!["links".into()]));
        assert!(parse_rlspec(&report_with("links: 0.8, 0.8\nbase: (0.5, 0)"), &row_one_design()).is_ok());
    }

    #[test]
    fn missing_block_and_bad_fields() {
        let mut r = report_with("");
        r.rlspec = None;
        assert_eq!(parse_rlspec(&r, &row_one_design()).unwrap_err(), RlSpecError::Missing);
        assert!(matches!(
            parse_rlspec(&report_with("reward_weights: 1, 2"), &row_one_design()),
            Err(RlSpecError::InvalidField { .. })
        ));
        assert!(matches!(
            parse_rlspec(&report_with("dt: -1"), &row_one_design()),
            Err(RlSpecError::InvalidField { .. })
        ));
    }
}
