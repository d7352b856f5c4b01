//! Planar serial-arm geometry: kinematics, annulus reachability, CCD
//! inverse kinematics, exhaustive minimum-cost design search, and
//! verification of reported designs.

mod design;
mod ik;
mod kinematics;
mod reach;
mod verify;

pub use design::{
    cmp_designs, design_robots, link_multisets, ArmConfiguration, DesignError, DesignProblem, RobotAssignment,
    RobotDesign, DEFAULT_MARGIN,
};
pub use ik::{solve_ik, wrap_angle, IkSolution};
pub use kinematics::{forward_kinematics, tip_position};
pub use reach::{is_reachable, reach_interval, REACH_EPS};
pub use verify::{design_from_report, verify_design, DesignFindings, IK_MAX_SWEEPS, IK_TOL};
