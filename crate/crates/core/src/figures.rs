//! SVG figures of training runs, each written next to a CSV twin holding
//! exactly the data it plots.

use crate::arm::reach_interval;
use crate::geometry::{fmt_num, Point2};
use crate::rl::export::{learning_curve_csv, trajectories_csv};
use crate::rl::{CurvePoint, RlSpec, Trajectory};
use std::fmt::Write;
use std::path::{Path, PathBuf};

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 420.0;
const PAD: f64 = 50.0;
/// Wider left margin so y tick labels fit.
const PAD_LEFT: f64 = 75.0;
const PLOT_W: f64 = WIDTH - PAD_LEFT - PAD;
const PLOT_H: f64 = HEIGHT - 2.0 * PAD;
pub const MOVING_AVERAGE_WINDOW: usize = 10;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Linear map from a data box onto the drawing area (y pointing up).
#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (x0, x1) = bounds(xs);
        let (y0, y1) = bounds(ys);
        Self { x0, x1, y0, y1 }
    }

    /// Equal scale on both axes, for workspace views.
    fn square(mut self) -> Self {
        let sx = PLOT_W / (self.x1 - self.x0);
        let sy = PLOT_H / (self.y1 - self.y0);
        if sx < sy {
            let extra = PLOT_H / sx - (self.y1 - self.y0);
            self.y0 -= extra / 2.0;
            self.y1 += extra / 2.0;
        } else {
            let extra = PLOT_W / sy - (self.x1 - self.x0);
            self.x0 -= extra / 2.0;
            self.x1 += extra / 2.0;
        }
        self
    }

    fn px(&self, x: f64) -> f64 {
        PAD_LEFT + (x - self.x0) / (self.x1 - self.x0) * PLOT_W
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - PAD - (y - self.y0) / (self.y1 - self.y0) * PLOT_H
    }

    fn scale(&self) -> f64 {
        PLOT_W / (self.x1 - self.x0)
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn svg_open(title: &str) -> String {
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick(v: f64) -> String {
    fmt_num((v * 1000.0).round() / 1000.0)
}

fn axes(s: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (PAD_LEFT, WIDTH - PAD, PAD, HEIGHT - PAD);
    let _ = writeln!(
        s,
        "<g class=\"axes\" stroke=\"black\" fill=\"none\"><line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\"/><line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\"/></g>"
    );
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
        let _ = writeln!(
            s,
            "<text x=\"{x:.1}\" y=\"{y:.1}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"11\">{text}</text>"
        );
    };
    label(s, l, b + 16.0, "start", tick(frame.x0));
    label(s, r, b + 16.0, "end", tick(frame.x1));
    label(s, l - 4.0, b, "end", tick(frame.y0));
    label(s, l - 4.0, t + 4.0, "end", tick(frame.y1));
    label(s, PAD_LEFT + PLOT_W / 2.0, HEIGHT - 12.0, "middle", escape(x_label));
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{:.1}\" transform=\"rotate(-90 14 {:.1})\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

fn polyline(s: &mut String, class: &str, color: &str, points: impl Iterator<Item = (f64, f64)>) {
    let pts: Vec<String> = points.map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    if pts.is_empty() {
        return;
    }
    let _ = writeln!(
        s,
        "<polyline class=\"{class}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
        pts.join(" ")
    );
}

fn legend(s: &mut String, entries: impl Iterator<Item = (String, &'static str)>) {
    for (i, (name, color)) in entries.enumerate() {
        // One row between the title and the plot area.
        let y = PAD - 8.0;
        let x = PAD_LEFT + 110.0 * i as f64;
        let _ = writeln!(
            s,
            "<g class=\"legend\"><line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"2\"/><text x=\"{:.1}\" y=\"{y:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}</text></g>",
            y - 4.0,
            x + 18.0,
            y - 4.0,
            x + 24.0,
            escape(&name)
        );
    }
}

/// Trailing moving average over `window` points (shorter at the start).
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for i in 0..values.len() {
        sum += values[i];
        if i >= window {
            sum -= values[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

/// Episode vs total reward, with a moving-average overlay.
pub fn learning_curve_svg(curve: &[CurvePoint], title: &str) -> String {
    let frame = Frame::new(curve.iter().map(|p| p.episode as f64), curve.iter().map(|p| p.total_reward));
    let mut s = svg_open(title);
    axes(&mut s, &frame, "episode", "total reward");
    polyline(&mut s, "reward", "#9ab", curve.iter().map(|p| (frame.px(p.episode as f64), frame.py(p.total_reward))));
    if !curve.is_empty() {
        legend(
            &mut s,
            [("episode".to_string(), "#9ab"), (format!("{MOVING_AVERAGE_WINDOW}-ep. mean"), PALETTE[0])].into_iter(),
        );
    }
    let rewards: Vec<f64> = curve.iter().map(|p| p.total_reward).collect();
    let avg = moving_average(&rewards, MOVING_AVERAGE_WINDOW);
    polyline(
        &mut s,
        "moving-average",
        PALETTE[0],
        curve.iter().zip(&avg).map(|(p, a)| (frame.px(p.episode as f64), frame.py(*a))),
    );
    s.push_str("</svg>\n");
    s
}

/// Joint angle against time, one polyline per (target, joint).
pub fn motor_control_svg(trajectories: &[Trajectory], title: &str) -> String {
    let frame = Frame::new(
        trajectories.iter().flat_map(|t| t.steps.iter().map(|s| s.t)),
        trajectories.iter().flat_map(|t| t.steps.iter().flat_map(|s| s.joint_angles.iter().copied())),
    );
    let mut s = svg_open(title);
    axes(&mut s, &frame, "time (s)", "joint angle (rad)");
    let joints = trajectories.first().and_then(|t| t.steps.first()).map(|s| s.joint_angles.len()).unwrap_or(0);
    legend(&mut s, (0..joints).map(|j| (format!("joint {}", j + 1), PALETTE[j % PALETTE.len()])));
    for traj in trajectories {
        let n = traj.steps.first().map(|s| s.joint_angles.len()).unwrap_or(0);
        for j in 0..n {
            let color = PALETTE[j % PALETTE.len()];
            let _ = writeln!(s, "<g class=\"target-{} joint-{}\">", traj.target_index, j + 1);
            polyline(
                &mut s,
                "joint-angle",
                color,
                traj.steps.iter().map(|st| (frame.px(st.t), frame.py(st.joint_angles[j]))),
            );
            s.push_str("</g>\n");
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Workspace view: base marker, reachable annulus, target markers and the
/// tip path towards each target.
pub fn tip_trajectory_svg(spec: &RlSpec, trajectories: &[Trajectory], title: &str) -> String {
    let (inner, outer) = reach_interval(&spec.links);
    let b = spec.base;
    let xs = [b.x - outer, b.x + outer]
        .into_iter()
        .chain(spec.targets.iter().map(|t| t.x))
        .chain(trajectories.iter().flat_map(|t| t.steps.iter().map(|s| s.tip.x)));
    let ys = [b.y - outer, b.y + outer]
        .into_iter()
        .chain(spec.targets.iter().map(|t| t.y))
        .chain(trajectories.iter().flat_map(|t| t.steps.iter().map(|s| s.tip.y)));
    let frame = Frame::new(xs, ys).square();
    let mut s = svg_open(title);
    axes(&mut s, &frame, "x (m)", "y (m)");
    let circle = |s: &mut String, class: &str, c: Point2, r: f64, style: &str| {
        let _ = writeln!(
            s,
            "<circle class=\"{class}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" {style}/>",
            frame.px(c.x),
            frame.py(c.y),
            r
        );
    };
    circle(&mut s, "annulus", b, outer * frame.scale(), "fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4 3\"");
    if inner > 0.0 {
        circle(&mut s, "annulus", b, inner * frame.scale(), "fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4 3\"");
    }
    let _ = writeln!(
        s,
        "<rect class=\"base-marker\" x=\"{:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"black\"/>",
        frame.px(b.x) - 5.0,
        frame.py(b.y) - 5.0
    );
    for traj in trajectories {
        let color = PALETTE[traj.target_index % PALETTE.len()];
        polyline(&mut s, "tip-path", color, traj.steps.iter().map(|st| (frame.px(st.tip.x), frame.py(st.tip.y))));
    }
    for (i, t) in spec.targets.iter().enumerate() {
        circle(
            &mut s,
            "target-marker",
            *t,
            5.0,
            &format!("fill=\"none\" stroke=\"{}\" stroke-width=\"2\"", PALETTE[i % PALETTE.len()]),
        );
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct FigureError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

fn write(path: PathBuf, content: &str) -> Result<PathBuf, FigureError> {
    std::fs::write(&path, content).map_err(|source| FigureError { path: path.clone(), source })?;
    Ok(path)
}

/// Writes the three figures of one robot and their CSV twins into
/// `out_dir`, file names prefixed by `prefix`.
pub fn emit_figures(
    spec: &RlSpec,
    curve: &[CurvePoint],
    trajectories: &[Trajectory],
    out_dir: &Path,
    prefix: &str,
) -> Result<Vec<PathBuf>, FigureError> {
    std::fs::create_dir_all(out_dir).map_err(|source| FigureError { path: out_dir.to_path_buf(), source })?;
    let name = |stem: &str, ext: &str| out_dir.join(format!("{prefix}{stem}.{ext}"));
    let traj_csv = trajectories_csv(trajectories);
    Ok(vec![
        write(name("learning_curve", "svg"), &learning_curve_svg(curve, "Learning curve"))?,
        write(name("learning_curve", "csv"), &learning_curve_csv(curve))?,
        write(name("motor_control", "svg"), &motor_control_svg(trajectories, "Joint angles"))?,
        write(name("motor_control", "csv"), &traj_csv)?,
        write(name("tip_trajectory", "svg"), &tip_trajectory_svg(spec, trajectories, "End-effector paths"))?,
        write(name("tip_trajectory", "csv"), &traj_csv)?,
    ])
}
