//! Slow, independent reference implementations used to verify the fast
//! algorithms: joint-space sampling for reachability and naive enumeration
//! for the design search.

use crate::arm::{tip_position, DesignProblem, RobotDesign};
use crate::geometry::Point2;
use std::f64::consts::TAU;

/// Range of base-to-tip distances found by sampling joint space.
///
/// The first joint only rotates the arm, so it is fixed at zero; joints
/// 2..n-1 are sampled on a `grid`-point lattice each, and the last link is
/// swept through a full circle in closed form (a circle of radius `L` around
/// a point at distance `r` spans distances `[|r - L|, r + L]`). Single-link
/// arms need no sampling.
pub fn sampled_reach_interval(links: &[f64], grid: usize) -> (f64, f64) {
    assert!(!links.is_empty(), "arm needs at least one link");
    let (last, inner) = links.split_last().unwrap();
    if inner.is_empty() {
        return (*last, *last);
    }
    let free = inner.len() - 1;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut idx = vec![0usize; free];
    let mut angles = vec![0.0; inner.len()];
    loop {
        for (k, i) in idx.iter().enumerate() {
            angles[k + 1] = *i as f64 * TAU / grid as f64;
        }
        let r = tip_position(inner, &angles, Point2::ORIGIN).norm();
        lo = lo.min((r - last).abs());
        hi = hi.max(r + last);
        let mut k = 0;
        loop {
            if k == free {
                return (lo, hi);
            }
            idx[k] += 1;
            if idx[k] < grid {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Sampling-based reachability of `target` from `base` with no margin.
pub fn sampled_reachable(links: &[f64], base: Point2, target: Point2, grid: usize) -> bool {
    let (lo, hi) = sampled_reach_interval(links, grid);
    let d = target.distance(&base);
    lo <= d && d <= hi
}

/// One robot of a brute-force optimum: base and non-increasing links.
pub type OracleRobot = (Point2, Vec<f64>);

/// Optimal cost and every optimal robot set found by naive enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceOptimum {
    pub cost: f64,
    /// Each entry sorted by base coordinates.
    pub optima: Vec<Vec<OracleRobot>>,
}

impl BruteForceOptimum {
    /// Whether `design` is one of the optimal robot sets.
    pub fn contains(&self, design: &RobotDesign) -> bool {
        let mut robots: Vec<OracleRobot> = design.robots.iter().map(|r| (r.arm.base, r.arm.links.clone())).collect();
        robots.sort_by(|a, b| a.0.lex_cmp(&b.0));
        self.optima.contains(&robots)
    }
}

fn reaches(links: &[f64], base: Point2, target: Point2, margin: f64) -> bool {
    let total: f64 = links.iter().sum();
    let longest = links.iter().cloned().fold(0.0, f64::max);
    let d = target.distance(&base);
    let slack = 1e-9;
    (2.0 * longest - total) <= d + slack && d * (1.0 + margin) <= total + slack
}

/// Tries every subset of bases and every ordered link tuple per used base,
/// keeping the covers where every target is reached by some robot and
/// every robot reaches at least one target.
pub fn brute_force_design(problem: &DesignProblem, margin: f64) -> Option<BruteForceOptimum> {
    let mut tuples: Vec<Vec<f64>> = Vec::new();
    let mut frontier: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..problem.max_links {
        let mut next = Vec::new();
        for t in &frontier {
            for l in &problem.link_options {
                let mut t = t.clone();
                t.push(*l);
                next.push(t);
            }
        }
        tuples.extend(next.iter().cloned());
        frontier = next;
    }
    let nb = problem.base_options.len();
    let mut best: Option<(f64, usize, Vec<Vec<OracleRobot>>)> = None;
    for subset in 1u32..(1 << nb) {
        let bases: Vec<Point2> = (0..nb).filter(|b| subset & (1 << b) != 0).map(|b| problem.base_options[b]).collect();
        let mut pick = vec![0usize; bases.len()];
        loop {
            let robots: Vec<(Point2, &Vec<f64>)> = bases.iter().zip(&pick).map(|(b, i)| (*b, &tuples[*i])).collect();
            let covered = problem.targets.iter().all(|t| robots.iter().any(|(b, l)| reaches(l, *b, *t, margin)));
            let useful = robots.iter().all(|(b, l)| problem.targets.iter().any(|t| reaches(l, *b, *t, margin)));
            if covered && useful {
                let cost: f64 = robots.iter().map(|(_, l)| l.iter().sum::<f64>()).sum();
                let mut set: Vec<OracleRobot> = robots
                    .iter()
                    .map(|(b, l)| {
                        let mut l = (*l).clone();
                        l.sort_by(|a, b| b.total_cmp(a));
                        (*b, l)
                    })
                    .collect();
                set.sort_by(|a, b| a.0.lex_cmp(&b.0));
                let n = set.len();
                match &mut best {
                    None => best = Some((cost, n, vec![set])),
                    Some((c, bn, sets)) => {
                        if cost < *c - 1e-9 || ((cost - *c).abs() <= 1e-9 && n < *bn) {
                            *c = cost;
                            *bn = n;
                            *sets = vec![set];
                        } else if (cost - *c).abs() <= 1e-9 && n == *bn && !sets.contains(&set) {
                            sets.push(set);
                        }
                    }
                }
            }
            let mut k = 0;
            loop {
                if k == pick.len() {
                    break;
                }
                pick[k] += 1;
                if pick[k] < tuples.len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
            if k == pick.len() {
                break;
            }
        }
    }
    best.map(|(cost, _, optima)| BruteForceOptimum { cost, optima })
}
