//! CSV exports of learning curves and trajectories.

use super::train::{CurvePoint, Trajectory};
use crate::geometry::fmt_num;
use std::fmt::Write;

pub const CURVE_HEADER: &str = "episode,total_reward,final_distance";

pub fn learning_curve_csv(curve: &[CurvePoint]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for p in curve {
        let _ = writeln!(out, "{},{},{}", p.episode, fmt_num(p.total_reward), fmt_num(p.final_distance));
    }
    out
}

fn trajectory_header(n_links: usize, with_target: bool) -> String {
    let mut h = String::new();
    if with_target {
        h.push_str("target,");
    }
    h.push('t');
    for k in 1..=n_links {
        let _ = write!(h, ",theta_{k}");
    }
    h.push_str(",tip_x,tip_y,reward");
    h
}

fn trajectory_rows(out: &mut String, traj: &Trajectory, with_target: bool) {
    for s in &traj.steps {
        if with_target {
            let _ = write!(out, "{},", traj.target_index);
        }
        out.push_str(&fmt_num(s.t));
        for a in &s.joint_angles {
            out.push(',');
            out.push_str(&fmt_num(*a));
        }
        let _ = writeln!(out, ",{},{},{}", fmt_num(s.tip.x), fmt_num(s.tip.y), fmt_num(s.reward));
    }
}

/// `t,theta_1..theta_n,tip_x,tip_y,reward`, one row per logged step.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.steps[0].joint_angles.len();
    let mut out = trajectory_header(n, false);
    out.push('\n');
    trajectory_rows(&mut out, traj, false);
    out
}

/// Several trajectories of one arm in one table, prefixed by target index.
pub fn trajectories_csv(trajs: &[Trajectory]) -> String {
    let n = trajs.first().map(|t| t.steps[0].joint_angles.len()).unwrap_or(0);
    let mut out = trajectory_header(n, true);
    out.push('\n');
    for t in trajs {
        trajectory_rows(&mut out, t, true);
    }
    out
}
