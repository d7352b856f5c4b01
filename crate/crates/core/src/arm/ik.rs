use super::{forward_kinematics, tip_position, ArmConfiguration};
use crate::geometry::Point2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IkSolution {
    /// Relative joint angles (radians).
    pub joint_angles: Vec<f64>,
    pub tip_error: f64,
    pub converged: bool,
    pub sweeps: usize,
}

/// Rotation added to every joint when a sweep moves no joint.
const STALL_KICK: f64 = 0.5;

/// Largest extrapolation factor tried by the pattern move.
const MAX_STRIDE: f64 = 1e6;

/// Cyclic coordinate descent from the zero pose.
///
/// Each sweep visits the joints from tip to base and rotates each one so that
/// the joint-to-tip ray points at the target. After a sweep, a pattern move
/// extrapolates along the sweep's net joint change (strides 2, 4, 8, ...)
/// for as long as the error keeps falling. Plain CCD zig-zags and converges
/// only sublinearly near the inner reach boundary, where the arm must be
/// almost fully folded. A sweep that moves no joint while the error is above
/// `tol` (a pose collinear with the target) rotates every joint by
/// [`STALL_KICK`]. Non-convergence is reported through `converged = false`
/// together with the best error seen.
pub fn solve_ik(config: &ArmConfiguration, target: Point2, tol: f64, max_sweeps: usize) -> IkSolution {
    assert!(tol > 0.0, "tolerance must be positive");
    let n = config.links.len();
    let tip_error = |angles: &[f64]| tip_position(&config.links, angles, config.base).distance(&target);
    let mut angles = vec![0.0; n];
    let mut best_angles = angles.clone();
    let mut best_err = f64::INFINITY;

    for sweep in 0..=max_sweeps {
        let err = tip_error(&angles);
        if err < best_err {
            best_err = err;
            best_angles.clone_from(&angles);
        }
        if err <= tol {
            return IkSolution { joint_angles: angles, tip_error: err, converged: true, sweeps: sweep };
        }
        if sweep == max_sweeps {
            break;
        }
        let before = angles.clone();
        let mut moved = 0.0f64;
        for k in (0..n).rev() {
            let pts = forward_kinematics(&config.links, &angles, config.base);
            let joint = pts[k];
            let to_tip = pts[n] - joint;
            let to_target = target - joint;
            if to_tip.norm() < 1e-12 || to_target.norm() < 1e-12 {
                continue;
            }
            let delta = wrap_angle(to_target.y.atan2(to_target.x) - to_tip.y.atan2(to_tip.x));
            angles[k] = wrap_angle(angles[k] + delta);
            moved = moved.max(delta.abs());
        }
        if moved < 1e-12 {
            for a in angles.iter_mut() {
                *a = wrap_angle(*a + STALL_KICK);
            }
            continue;
        }
        let step: Vec<f64> = angles.iter().zip(&before).map(|(a, b)| wrap_angle(a - b)).collect();
        let mut current = tip_error(&angles);
        let mut stride = 2.0;
        while stride < MAX_STRIDE {
            let trial: Vec<f64> = before.iter().zip(&step).map(|(b, d)| wrap_angle(b + stride * d)).collect();
            let e = tip_error(&trial);
            if e >= current {
                break;
            }
            angles = trial;
            current = e;
            stride *= 2.0;
        }
    }
    IkSolution { joint_angles: best_angles, tip_error: best_err, converged: false, sweeps: max_sweeps }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}
