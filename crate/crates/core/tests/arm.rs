use autorobo_core::arm::{
    design_robots, forward_kinematics, is_reachable, solve_ik, ArmConfiguration, DesignProblem, DEFAULT_MARGIN,
    IK_MAX_SWEEPS, IK_TOL,
};
use autorobo_core::oracle::{brute_force_design, sampled_reach_interval};
use autorobo_core::scenario::{builtin_scenarios, example_scenario};
use autorobo_core::Point2;
use proptest::prelude::*;

const BAND: f64 = 1e-2;
const GRID: usize = 2048;

fn links() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1..2.0f64, 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, ..ProptestConfig::default() })]

    #[test]
    fn annulus_agrees_with_sampling_outside_the_band(
        links in links(),
        base in (-1.0..1.0f64, -1.0..1.0f64),
        dir in 0.0..std::f64::consts::TAU,
        frac in 0.0..1.2f64,
    ) {
        let base = Point2::new(base.0, base.1);
        let total: f64 = links.iter().sum();
        let d = frac * total;
        let target = Point2::new(base.x + d * dir.cos(), base.y + d * dir.sin());
        let (lo, hi) = sampled_reach_interval(&links, GRID);
        let oracle = lo <= d && d <= hi;
        let near_boundary = (d - lo).abs() < BAND || (d - hi).abs() < BAND;
        let fast = is_reachable(&ArmConfiguration::new(links.clone(), base), target, 0.0);
        prop_assert!(near_boundary || fast == oracle, "links {links:?} d {d} oracle [{lo}, {hi}] fast {fast}");
    }

    #[test]
    fn ik_certifies_reachable_targets(
        links in links(),
        dir in 0.0..std::f64::consts::TAU,
        frac in 0.0..1.0f64,
        margin in 0.01..0.2f64,
    ) {
        let arm = ArmConfiguration::new(links.clone(), Point2::new(0.3, -0.2));
        let (lo, hi) = arm.reach();
        let d = lo + frac * (hi / (1.0 + margin) - lo).max(0.0);
        let target = Point2::new(arm.base.x + d * dir.cos(), arm.base.y + d * dir.sin());
        prop_assume!(is_reachable(&arm, target, margin));
        let sol = solve_ik(&arm, target, IK_TOL, IK_MAX_SWEEPS);
        prop_assert!(sol.converged && sol.tip_error <= 1e-3, "{links:?} {target:?}: {sol:?}");
    }

    #[test]
    fn ik_certifies_targets_on_the_zero_pose_ray(links in links(), frac in 0.0..1.0f64) {
        // targets collinear with the stretched start pose
        let arm = ArmConfiguration::new(links.clone(), Point2::new(0.0, 0.5));
        let (lo, hi) = arm.reach();
        let d = lo + frac * (hi - lo);
        for target in [Point2::new(d, 0.5), Point2::new(-d, 0.5)] {
            prop_assume!(is_reachable(&arm, target, 0.0));
            let sol = solve_ik(&arm, target, IK_TOL, IK_MAX_SWEEPS);
            prop_assert!(sol.converged && sol.tip_error <= 1e-3, "{links:?} {target:?}: {sol:?}");
        }
    }

    #[test]
    fn forward_kinematics_conserves_link_lengths(
        links in links(),
        angles in prop::collection::vec(-10.0..10.0f64, 3),
    ) {
        let pts = forward_kinematics(&links, &angles[..links.len()], Point2::new(1.0, 2.0));
        prop_assert_eq!(pts.len(), links.len() + 1);
        for (k, w) in pts.windows(2).enumerate() {
            prop_assert!((w[1].distance(&w[0]) - links[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn design_search_matches_brute_force_on_every_fixture() {
    let mut scenarios = builtin_scenarios();
    scenarios.push(example_scenario());
    for s in &scenarios {
        let problem = DesignProblem::from_scenario(s);
        for margin in [0.0, DEFAULT_MARGIN] {
            let fast = design_robots(&problem, margin).unwrap();
            let slow = brute_force_design(&problem, margin).unwrap();
            for (i, robot) in fast.robots.iter().enumerate() {
                for target in fast.robot_targets(i) {
                    let sol = solve_ik(&robot.arm, target, IK_TOL, IK_MAX_SWEEPS);
                    assert!(sol.converged && sol.tip_error <= 1e-3, "scenario {} {target:?}: {sol:?}", s.id);
                }
            }
            assert!((fast.total_cost - slow.cost).abs() < 1e-9, "scenario {} margin {margin}", s.id);
            assert!(slow.contains(&fast), "scenario {} margin {margin}: {fast:?} not in {:?}", s.id, slow.optima);
        }
    }
}

#[test]
fn brute_force_agrees_on_random_problems() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let mut p = |r: f64| Point2::new(rng.random_range(-r..r), rng.random_range(-r..r));
        let problem = DesignProblem {
            base_options: (0..2).map(|_| p(1.0)).collect(),
            targets: (0..3).map(|_| p(2.0)).collect(),
            link_options: vec![0.5, 0.8, 1.2],
            max_links: 2,
        };
        match (design_robots(&problem, 0.0), brute_force_design(&problem, 0.0)) {
            (Ok(fast), Some(slow)) => {
                assert!((fast.total_cost - slow.cost).abs() < 1e-9);
                assert!(slow.contains(&fast), "{problem:?}");
            }
            (Err(_), None) => {}
            (fast, slow) => panic!("disagree on {problem:?}: {fast:?} vs {slow:?}"),
        }
    }
}
