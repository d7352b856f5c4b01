//! Training entry point, results, and deterministic policy evaluation.

use super::env::{env_reset_exact, env_step, tip, Terminal};
use super::policy::GaussianPolicy;
use super::spec::RlSpec;
use super::{cem, ppo};
use crate::geometry::Point2;
use crate::report::Algorithm;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episode: usize,
    pub total_reward: f64,
    pub final_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingResult {
    /// Algorithm that actually ran (a declared SAC runs as PPO).
    pub executed: Algorithm,
    pub learning_curve: Vec<CurvePoint>,
    pub policy: GaussianPolicy,
    /// Per target: does the deterministic policy reach it from the rest pose?
    pub success: Vec<bool>,
    pub wall_time: f64,
    pub deviations: Vec<String>,
    /// Set when training stopped on a numerical failure.
    pub failure: Option<String>,
}

impl TrainingResult {
    pub fn all_success(&self) -> bool {
        !self.success.is_empty() && self.success.iter().all(|s| *s)
    }

    pub fn diverged(&self) -> bool {
        self.failure.is_some()
    }

    /// Mean final distance over the first and the last tenth of the curve
    /// (at least one episode each).
    pub fn progress_window_means(&self) -> Option<(f64, f64)> {
        let n = self.learning_curve.len();
        if n < 2 {
            return None;
        }
        let w = (n / 10).max(1);
        let mean = |pts: &[CurvePoint]| pts.iter().map(|p| p.final_distance).sum::<f64>() / pts.len() as f64;
        Some((mean(&self.learning_curve[..w]), mean(&self.learning_curve[n - w..])))
    }

    /// True when the last tenth of training ends closer to the targets than
    /// the first tenth did.
    pub fn shows_progress(&self) -> bool {
        matches!(self.progress_window_means(), Some((first, last)) if last < first)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub t: f64,
    pub joint_angles: Vec<f64>,
    pub tip: Point2,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub target_index: usize,
    pub target: Point2,
    /// Step 0 is the reset pose (reward 0); each later step follows one action.
    pub steps: Vec<TrajectoryStep>,
    pub actions: Vec<Vec<f64>>,
    pub terminal: Terminal,
}

impl Trajectory {
    pub fn final_distance(&self) -> f64 {
        self.steps.last().unwrap().tip.distance(&self.target)
    }
}

/// Trains one goal-conditioned policy for `spec`.
///
/// PPO and CEM run natively; SAC runs as PPO and records a deviation; any
/// other algorithm name also falls back to PPO with a deviation.
pub fn train(spec: &RlSpec) -> TrainingResult {
    spec.validate().expect("invalid RL spec");
    let started = Instant::now();
    let mut deviations = Vec::new();
    let executed = match &spec.algorithm {
        Algorithm::Ppo => Algorithm::Ppo,
        Algorithm::Cem => Algorithm::Cem,
        Algorithm::Sac => {
            deviations.push("SAC requested; executed with the native PPO trainer".to_string());
            Algorithm::Ppo
        }
        Algorithm::Other(name) => {
            deviations.push(format!("algorithm `{name}` has no native trainer; executed with PPO"));
            Algorithm::Ppo
        }
    };
    let run = match executed {
        Algorithm::Cem => cem::train_cem(spec, &cem::CemConfig::default()),
        _ => ppo::train_ppo(spec, &ppo::PpoConfig::default()),
    };
    let success = if run.failure.is_some() {
        vec![false; spec.targets.len()]
    } else {
        (0..spec.targets.len()).map(|i| evaluate(&run.policy, spec, i).terminal == Terminal::Success).collect()
    };
    TrainingResult {
        executed,
        learning_curve: run.curve,
        policy: run.policy,
        success,
        wall_time: started.elapsed().as_secs_f64(),
        deviations,
        failure: run.failure,
    }
}

/// Output of a trainer before evaluation.
pub(crate) struct RawRun {
    pub curve: Vec<CurvePoint>,
    pub policy: GaussianPolicy,
    pub failure: Option<String>,
}

/// One noise-free episode from the rest pose using the policy mean.
pub fn evaluate(policy: &GaussianPolicy, spec: &RlSpec, target_index: usize) -> Trajectory {
    assert_eq!(
        policy.net.input_dim(),
        super::env::Observation::dim(spec.links.len()),
        "policy does not match the arm geometry"
    );
    assert_eq!(policy.net.output_dim(), spec.links.len(), "policy does not match the arm geometry");
    let reach = spec.total_reach();
    let (mut state, mut obs) = env_reset_exact(spec, target_index);
    let mut steps = vec![TrajectoryStep {
        t: 0.0,
        joint_angles: state.joint_angles.clone(),
        tip: tip(spec, &state.joint_angles),
        reward: 0.0,
    }];
    let mut actions = Vec::new();
    loop {
        let action = policy.mean(&obs.features(reach));
        let step = env_step(&state, &action, spec);
        actions.push(super::env::clamp_action(spec, &action));
        steps.push(TrajectoryStep {
            t: step.state.step_count as f64 * spec.dt,
            joint_angles: step.state.joint_angles.clone(),
            tip: tip(spec, &step.state.joint_angles),
            reward: step.reward,
        });
        state = step.state;
        obs = step.observation;
        if let Some(terminal) = step.done {
            return Trajectory { target_index, target: spec.targets[target_index], steps, actions, terminal };
        }
    }
}
