use crate::geometry::Point2;

/// Joint positions `p_0 = base .. p_n = tip` of a planar serial arm.
///
/// Angles are relative: joint 1 is measured from the +x axis and joint k
/// from the direction of link k-1.
///
/// # Panics
///
/// Panics when `links` and `angles` differ in length or are empty.
pub fn forward_kinematics(links: &[f64], angles: &[f64], base: Point2) -> Vec<Point2> {
    assert_eq!(links.len(), angles.len(), "one angle per link");
    assert!(!links.is_empty(), "arm needs at least one link");
    let mut points = Vec::with_capacity(links.len() + 1);
    points.push(base);
    let mut heading = 0.0;
    let mut p = base;
    for (l, a) in links.iter().zip(angles) {
        heading += a;
        p = Point2::new(p.x + l * heading.cos(), p.y + l * heading.sin());
        points.push(p);
    }
    points
}

/// Tip position only.
pub fn tip_position(links: &[f64], angles: &[f64], base: Point2) -> Point2 {
    *forward_kinematics(links, angles, base).last().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: Point2, b: Point2) -> bool {
        a.distance(&b) < 1e-12
    }

    #[test]
    fn straight_arm() {
        let tip = tip_position(&[1.0, 1.0], &[0.0, 0.0], Point2::ORIGIN);
        assert!(close(tip, Point2::new(2.0, 0.0)));
    }

    #[test]
    fn elbow_up() {
        let pts = forward_kinematics(&[1.0, 1.0], &[PI / 2.0, -PI / 2.0], Point2::ORIGIN);
        let expected = [Point2::new(0.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 1.0)];
        for (a, b) in pts.iter().zip(expected) {
            assert!(close(*a, b), "{a} vs {b}");
        }
    }

    #[test]
    fn reflection() {
        let tip = tip_position(&[1.0], &[PI], Point2::new(1.0, 0.0));
        assert!(close(tip, Point2::ORIGIN));
    }

    #[test]
    #[should_panic]
    fn length_mismatch_panics() {
        forward_kinematics(&[1.0, 1.0], &[0.0], Point2::ORIGIN);
    }

    proptest! {
        #[test]
        fn link_lengths_are_conserved(
            links in prop::collection::vec(0.1f64..2.0, 1..4),
            seed_angles in prop::collection::vec(-10.0f64..10.0, 3),
            bx in -5.0f64..5.0, by in -5.0f64..5.0,
        ) {
            let angles = &seed_angles[..links.len()];
            let pts = forward_kinematics(&links, angles, Point2::new(bx, by));
            for k in 1..pts.len() {
                prop_assert!((pts[k].distance(&pts[k - 1]) - links[k - 1]).abs() < 1e-12);
            }
        }
    }
}
