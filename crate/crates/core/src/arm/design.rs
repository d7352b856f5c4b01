use super::reach::is_reachable;
use super::reach_interval;
use crate::geometry::{fmt_num, Point2};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashMap;
use thiserror::Error;

pub const DEFAULT_MARGIN: f64 = 0.05;
const COST_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmConfiguration {
    /// Link lengths in meters, base to tip.
    pub links: Vec<f64>,
    pub base: Point2,
}

impl ArmConfiguration {
    pub fn new(links: Vec<f64>, base: Point2) -> Self {
        Self { links, base }
    }

    pub fn total_length(&self) -> f64 {
        self.links.iter().sum()
    }

    pub fn reach(&self) -> (f64, f64) {
        reach_interval(&self.links)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotAssignment {
    pub arm: ArmConfiguration,
    /// Indices into the target list this robot serves.
    pub targets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotDesign {
    pub robots: Vec<RobotAssignment>,
    pub targets: Vec<Point2>,
    pub total_cost: f64,
    pub margin: f64,
}

impl RobotDesign {
    pub fn link_count(&self) -> usize {
        self.robots.iter().map(|r| r.arm.links.len()).sum()
    }

    /// Targets served by robot `i`, as points.
    pub fn robot_targets(&self, i: usize) -> Vec<Point2> {
        self.robots[i].targets.iter().map(|&t| self.targets[t]).collect()
    }
}

/// Geometry input to the design search.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignProblem {
    pub base_options: Vec<Point2>,
    pub targets: Vec<Point2>,
    pub link_options: Vec<f64>,
    pub max_links: usize,
}

impl DesignProblem {
    pub fn from_scenario(s: &crate::scenario::TaskScenario) -> Self {
        Self {
            base_options: s.base_options.clone(),
            targets: s.targets.clone(),
            link_options: s.link_options.clone(),
            max_links: s.max_links_per_robot,
        }
    }

    pub fn from_analysis(a: &crate::report::TaskAnalysisReport, max_links: usize) -> Self {
        Self {
            base_options: a.base_options.clone(),
            targets: a.targets.clone(),
            link_options: a.link_options.clone(),
            max_links,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("design problem is empty: {0}")]
    Empty(&'static str),
    #[error("no feasible design:\n{}", .diagnostics.join("\n"))]
    Infeasible { diagnostics: Vec<String> },
}

/// All non-increasing link sequences of length 1..=max_links drawn from the
/// options.
pub fn link_multisets(options: &[f64], max_links: usize) -> Vec<Vec<f64>> {
    let mut opts: Vec<f64> = options.to_vec();
    opts.sort_by(|a, b| b.total_cmp(a));
    opts.dedup();
    let mut out = Vec::new();
    fn rec(opts: &[f64], start: usize, left: usize, cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in start..opts.len() {
            cur.push(opts[i]);
            rec(opts, i, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(&opts, 0, max_links, &mut Vec::new(), &mut out);
    out
}

fn cmp_cost(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= COST_TOL {
        Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

fn cmp_links(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Cheapest single-arm choice for one base: (cost, link count, links) order.
fn cheapest_arm(multisets: &[Vec<f64>], base: Point2, targets: &[Point2], margin: f64) -> Option<Vec<f64>> {
    multisets
        .iter()
        .filter(|links| {
            let arm = ArmConfiguration::new((*links).clone(), base);
            targets.iter().all(|t| is_reachable(&arm, *t, margin))
        })
        .min_by(|a, b| {
            cmp_cost(a.iter().sum(), b.iter().sum()).then(a.len().cmp(&b.len())).then_with(|| cmp_links(a, b))
        })
        .cloned()
}

/// Total order on candidate designs: cost, robot count, link count, base
/// coordinates, link lists, then target assignment.
pub fn cmp_designs(a: &RobotDesign, b: &RobotDesign) -> Ordering {
    cmp_cost(a.total_cost, b.total_cost)
        .then(a.robots.len().cmp(&b.robots.len()))
        .then(a.link_count().cmp(&b.link_count()))
        .then_with(|| {
            for (ra, rb) in a.robots.iter().zip(&b.robots) {
                let o = ra.arm.base.lex_cmp(&rb.arm.base);
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
        .then_with(|| {
            for (ra, rb) in a.robots.iter().zip(&b.robots) {
                let o = cmp_links(&ra.arm.links, &rb.arm.links);
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
        .then_with(|| {
            let ta: Vec<&Vec<usize>> = a.robots.iter().map(|r| &r.targets).collect();
            let tb: Vec<&Vec<usize>> = b.robots.iter().map(|r| &r.targets).collect();
            ta.cmp(&tb)
        })
}

/// Exhaustive minimum-cost design search.
///
/// Every target goes to exactly one robot, every robot sits on a distinct
/// base option and serves at least one target, and every robot reaches all
/// of its targets with `margin` spare outer reach. Robots in the result are
/// ordered by base coordinates.
pub fn design_robots(problem: &DesignProblem, margin: f64) -> Result<RobotDesign, DesignError> {
    if problem.base_options.is_empty() {
        return Err(DesignError::Empty("no base options"));
    }
    if problem.targets.is_empty() {
        return Err(DesignError::Empty("no targets"));
    }
    if problem.link_options.is_empty() || problem.max_links == 0 {
        return Err(DesignError::Empty("no link options"));
    }
    let multisets = link_multisets(&problem.link_options, problem.max_links);
    let nb = problem.base_options.len();
    let nt = problem.targets.len();
    let mut cache: HashMap<(usize, u64), Option<Vec<f64>>> = HashMap::new();
    let mut best: Option<RobotDesign> = None;

    // each target picks a base; the used bases become robots
    let mut choice = vec![0usize; nt];
    loop {
        let mut masks = vec![0u64; nb];
        for (t, &b) in choice.iter().enumerate() {
            masks[b] |= 1 << t;
        }
        let mut robots = Vec::new();
        let mut feasible = true;
        for (b, &mask) in masks.iter().enumerate() {
            if mask == 0 {
                continue;
            }
            let base = problem.base_options[b];
            let links = cache.entry((b, mask)).or_insert_with(|| {
                let pts: Vec<Point2> = (0..nt).filter(|t| mask & (1 << t) != 0).map(|t| problem.targets[t]).collect();
                cheapest_arm(&multisets, base, &pts, margin)
            });
            match links {
                Some(links) => robots.push(RobotAssignment {
                    arm: ArmConfiguration::new(links.clone(), base),
                    targets: (0..nt).filter(|t| mask & (1 << t) != 0).collect(),
                }),
                None => {
                    feasible = false;
                    break;
                }
            }
        }
        if feasible {
            robots.sort_by(|a, b| a.arm.base.lex_cmp(&b.arm.base));
            let total_cost = robots.iter().map(|r| r.arm.total_length()).sum();
            let candidate = RobotDesign { robots, targets: problem.targets.clone(), total_cost, margin };
            if best.as_ref().is_none_or(|b| cmp_designs(&candidate, b) == Ordering::Less) {
                best = Some(candidate);
            }
        }
        // next assignment (odometer)
        let mut i = 0;
        loop {
            if i == nt {
                return best.ok_or_else(|| infeasibility(problem, &multisets, margin));
            }
            choice[i] += 1;
            if choice[i] < nb {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn infeasibility(problem: &DesignProblem, multisets: &[Vec<f64>], margin: f64) -> DesignError {
    let mut diagnostics = Vec::new();
    for (ti, target) in problem.targets.iter().enumerate() {
        let alone = problem.base_options.iter().any(|b| cheapest_arm(multisets, *b, &[*target], margin).is_some());
        if alone {
            continue;
        }
        for base in &problem.base_options {
            let d = target.distance(base);
            let longest =
                multisets.iter().max_by(|a, b| a.iter().sum::<f64>().total_cmp(&b.iter().sum::<f64>())).unwrap();
            let (lo, hi) = reach_interval(longest);
            diagnostics.push(format!(
                "target {ti} {target}: from base {base} distance {:.3} m, best arm [{}] covers [{:.3}, {:.3}] m (margin {})",
                d,
                longest.iter().map(|l| fmt_num(*l)).collect::<Vec<_>>().join(", "),
                lo,
                hi,
                fmt_num(margin)
            ));
        }
    }
    if diagnostics.is_empty() {
        diagnostics.push(
            "every target is reachable alone, but no partition lets each base serve its targets with one arm".into(),
        );
    }
    DesignError::Infeasible { diagnostics }
}
