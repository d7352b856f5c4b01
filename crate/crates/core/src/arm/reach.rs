use super::ArmConfiguration;
use crate::geometry::Point2;

/// Slack used in reachability comparisons to absorb float rounding.
pub const REACH_EPS: f64 = 1e-9;

/// Inner and outer radius of the annulus a full-revolute planar chain covers.
pub fn reach_interval(links: &[f64]) -> (f64, f64) {
    let total: f64 = links.iter().sum();
    let longest = links.iter().cloned().fold(0.0, f64::max);
    ((2.0 * longest - total).max(0.0), total)
}

/// Whether `target` lies in the arm's annulus with `margin` spare outer reach.
pub fn is_reachable(config: &ArmConfiguration, target: Point2, margin: f64) -> bool {
    let (min_reach, max_reach) = reach_interval(&config.links);
    let d = target.distance(&config.base);
    min_reach <= d + REACH_EPS && d * (1.0 + margin) <= max_reach + REACH_EPS
}
