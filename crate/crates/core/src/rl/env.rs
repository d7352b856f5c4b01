//! Goal-conditioned planar reaching environment.
//!
//! State is the vector of relative joint angles plus the active target;
//! actions are joint velocities clamped to the action limit and integrated
//! over one time step.

use super::spec::RlSpec;
use crate::arm::forward_kinematics;
use crate::geometry::Point2;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const RESET_NOISE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub joint_angles: Vec<f64>,
    pub active_target: usize,
    pub step_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// (sin, cos) of each cumulative joint angle.
    pub joints: Vec<(f64, f64)>,
    pub dx: f64,
    pub dy: f64,
    pub distance: f64,
}

impl Observation {
    pub fn dim(n_links: usize) -> usize {
        2 * n_links + 3
    }

    /// Network input: trig features as-is, tip-to-target terms divided by
    /// the arm's total reach.
    pub fn features(&self, reach: f64) -> Vec<f64> {
        let mut f = Vec::with_capacity(2 * self.joints.len() + 3);
        for (s, c) in &self.joints {
            f.push(*s);
            f.push(*c);
        }
        f.push(self.dx / reach);
        f.push(self.dy / reach);
        f.push(self.distance / reach);
        f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terminal {
    Success,
    Timeout,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub state: EnvState,
    pub observation: Observation,
    pub reward: f64,
    pub done: Option<Terminal>,
}

pub fn tip(spec: &RlSpec, angles: &[f64]) -> Point2 {
    *forward_kinematics(&spec.links, angles, spec.base).last().unwrap()
}

pub fn observe(spec: &RlSpec, state: &EnvState) -> Observation {
    let mut cumulative = 0.0;
    let joints = state
        .joint_angles
        .iter()
        .map(|a| {
            cumulative += a;
            cumulative.sin_cos()
        })
        .collect();
    let target = spec.targets[state.active_target];
    let tip = tip(spec, &state.joint_angles);
    let (dx, dy) = (target.x - tip.x, target.y - tip.y);
    Observation { joints, dx, dy, distance: dx.hypot(dy) }
}

/// Zero pose plus seeded uniform noise in `[-RESET_NOISE, RESET_NOISE]`.
pub fn env_reset<R: Rng>(spec: &RlSpec, target_index: usize, rng: &mut R) -> (EnvState, Observation) {
    assert!(target_index < spec.targets.len(), "target index out of range");
    let joint_angles = (0..spec.links.len()).map(|_| rng.random_range(-RESET_NOISE..=RESET_NOISE)).collect();
    let state = EnvState { joint_angles, active_target: target_index, step_count: 0 };
    let obs = observe(spec, &state);
    (state, obs)
}

/// Noise-free reset used for evaluation.
pub fn env_reset_exact(spec: &RlSpec, target_index: usize) -> (EnvState, Observation) {
    assert!(target_index < spec.targets.len(), "target index out of range");
    let state = EnvState { joint_angles: vec![0.0; spec.links.len()], active_target: target_index, step_count: 0 };
    let obs = observe(spec, &state);
    (state, obs)
}

pub fn clamp_action(spec: &RlSpec, action: &[f64]) -> Vec<f64> {
    action.iter().map(|a| a.clamp(-spec.action_limit, spec.action_limit)).collect()
}

pub fn env_step(state: &EnvState, action: &[f64], spec: &RlSpec) -> Step {
    assert_eq!(action.len(), spec.links.len(), "one action per joint");
    let clamped = clamp_action(spec, action);
    let joint_angles: Vec<f64> =
        state.joint_angles.iter().zip(&clamped).map(|(theta, a)| theta + a * spec.dt).collect();
    let next = EnvState { joint_angles, active_target: state.active_target, step_count: state.step_count + 1 };
    let observation = observe(spec, &next);
    let d = observation.distance;
    let w = &spec.reward_weights;
    let effort: f64 = clamped.iter().map(|a| a * a).sum();
    let reached = d < spec.success_epsilon;
    let reward = -w.distance * d - w.action_penalty * effort + if reached { w.success_bonus } else { 0.0 };
    let done = if reached {
        Some(Terminal::Success)
    } else if next.step_count >= spec.max_steps {
        Some(Terminal::Timeout)
    } else {
        None
    };
    Step { state: next, observation, reward, done }
}
