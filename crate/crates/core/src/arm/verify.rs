use super::design::{design_robots, ArmConfiguration, DesignProblem, RobotAssignment, RobotDesign};
use super::ik::solve_ik;
use super::reach::is_reachable;
use crate::geometry::Point2;
use crate::report::RobotDesignReport;
use crate::scenario::TaskScenario;
use serde::{Deserialize, Serialize};

pub const IK_TOL: f64 = 1e-3;
pub const IK_MAX_SWEEPS: usize = 2000;
const POINT_TOL: f64 = 1e-6;

/// Outcome of checking a reported design against the scenario and the
/// optimal design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignFindings {
    pub links_in_options: bool,
    pub bases_in_options: bool,
    /// Every target has a robot whose annulus contains it and whose IK
    /// solution certifies it.
    pub all_reachable: bool,
    pub cost: f64,
    pub optimal_cost: Option<f64>,
    pub cost_ratio: Option<f64>,
    pub findings: Vec<String>,
}

impl DesignFindings {
    pub fn all_pass(&self) -> bool {
        self.links_in_options
            && self.bases_in_options
            && self.all_reachable
            && self.cost_ratio.is_some_and(|r| r <= 1.0 + 1e-9)
    }
}

fn fmt_options(options: &[f64]) -> String {
    let parts: Vec<String> = options.iter().map(|l| format!("{l:?}")).collect();
    format!("{{{}}}", parts.join(","))
}

fn same_point(a: &Point2, b: &Point2) -> bool {
    a.distance(b) <= POINT_TOL
}

/// Builds a design from a parsed Robot Design Report over `targets`.
///
/// Robot `k` gets the k-th selected base. Targets come from the report's
/// per-base lists when it has them; otherwise each target goes to the first
/// robot that reaches it. Targets no robot reaches are returned separately.
pub fn design_from_report(report: &RobotDesignReport, targets: &[Point2], margin: f64) -> (RobotDesign, Vec<usize>) {
    let mut arms: Vec<ArmConfiguration> = Vec::new();
    for (i, cfg) in report.arm_configurations.iter().enumerate() {
        let base = report.selected_bases.get(i).or(report.selected_bases.last()).copied().unwrap_or(Point2::ORIGIN);
        let mut links = cfg.links.clone();
        links.sort_by(|a, b| b.total_cmp(a));
        arms.push(ArmConfiguration::new(links, base));
    }
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); arms.len()];
    let mut unassigned = Vec::new();
    for (ti, t) in targets.iter().enumerate() {
        let listed = report
            .assigned_targets
            .iter()
            .position(|pts| pts.iter().any(|p| same_point(p, t)))
            .filter(|r| *r < arms.len());
        let robot = listed.or_else(|| arms.iter().position(|a| is_reachable(a, *t, margin)));
        match robot {
            Some(r) => assigned[r].push(ti),
            None => unassigned.push(ti),
        }
    }
    let robots: Vec<RobotAssignment> =
        arms.into_iter().zip(assigned).map(|(arm, targets)| RobotAssignment { arm, targets }).collect();
    let total_cost = robots.iter().map(|r| r.arm.total_length()).sum();
    (RobotDesign { robots, targets: targets.to_vec(), total_cost, margin }, unassigned)
}

/// Checks a reported design: option membership, certified reachability of
/// every scenario target, and cost relative to the optimum at `margin`.
pub fn verify_design(report: &RobotDesignReport, scenario: &TaskScenario, margin: f64) -> DesignFindings {
    let mut findings = Vec::new();
    let options = &scenario.link_options;

    let mut links_in_options = true;
    for cfg in &report.arm_configurations {
        for l in &cfg.links {
            if !options.iter().any(|o| (o - l).abs() <= 1e-9) {
                links_in_options = false;
                findings.push(format!("link not in options {}: robot {} uses {l:?}", fmt_options(options), cfg.robot));
            }
        }
        if cfg.links.len() > scenario.max_links_per_robot {
            links_in_options = false;
            findings.push(format!(
                "robot {} has {} links, more than {}",
                cfg.robot,
                cfg.links.len(),
                scenario.max_links_per_robot
            ));
        }
    }

    let mut bases_in_options = true;
    for b in &report.selected_bases {
        if !scenario.base_options.iter().any(|o| same_point(o, b)) {
            bases_in_options = false;
            findings.push(format!("base {b} not among the base options"));
        }
    }
    if report.selected_bases.len() < report.arm_configurations.len() {
        bases_in_options = false;
        findings.push(format!(
            "{} arm configurations but only {} selected bases",
            report.arm_configurations.len(),
            report.selected_bases.len()
        ));
    }

    let (design, unassigned) = design_from_report(report, &scenario.targets, margin);
    let mut all_reachable = unassigned.is_empty();
    for t in &unassigned {
        findings.push(format!("target {t} {} is not reachable by any robot", scenario.targets[*t]));
    }
    for (ri, robot) in design.robots.iter().enumerate() {
        for &t in &robot.targets {
            let target = scenario.targets[t];
            if !is_reachable(&robot.arm, target, margin) {
                all_reachable = false;
                findings.push(format!("robot {} cannot reach target {t} {target}", ri + 1));
                continue;
            }
            let sol = solve_ik(&robot.arm, target, IK_TOL, IK_MAX_SWEEPS);
            if !sol.converged {
                all_reachable = false;
                findings.push(format!(
                    "robot {} has no IK certificate for target {t} (error {:.2e})",
                    ri + 1,
                    sol.tip_error
                ));
            }
        }
    }

    let cost = design.total_cost;
    let optimal_cost = design_robots(&DesignProblem::from_scenario(scenario), margin).ok().map(|d| d.total_cost);
    let cost_ratio = optimal_cost.filter(|c| *c > 0.0).map(|c| cost / c);
    if optimal_cost.is_none() {
        findings.push("scenario has no feasible design at this margin".into());
    }
    DesignFindings { links_in_options, bases_in_options, all_reachable, cost, optimal_cost, cost_ratio, findings }
}
