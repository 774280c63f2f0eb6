use gaitforge_core::connection::{lie_bracket, polygon_area};
use gaitforge_core::geometry::hausdorff;
use gaitforge_core::models::{PurcellParams, Swimmer};
use gaitforge_core::ode::OdeOptions;
use gaitforge_core::simulate::{integrate_gait_with, time_reparametrization_check, Gait, SpeedProfile};
use gaitforge_core::{se2, BodyPose, LocalConnection, ShapePoint};
use proptest::prelude::*;

fn pose() -> impl Strategy<Value = BodyPose> {
    (-5.0..5.0f64, -5.0..5.0f64, -3.0..3.0f64).prop_map(|(x, y, theta)| BodyPose { x, y, theta })
}

fn close(a: BodyPose, b: BodyPose, tol: f64) -> bool {
    se2::pose_error(a, b) < tol
}

proptest! {
    #[test]
    fn bracket_has_no_rotation(a in prop::array::uniform3(prop::array::uniform2(-10.0..10.0f64))) {
        prop_assert_eq!(lie_bracket(&LocalConnection(a))[2], 0.0);
    }

    #[test]
    fn composition_is_associative(a in pose(), b in pose(), c in pose()) {
        let l = se2::compose(se2::compose(a, b), c);
        let r = se2::compose(a, se2::compose(b, c));
        prop_assert!(close(l, r, 1e-10));
    }

    #[test]
    fn inverse_undoes_composition(a in pose(), b in pose()) {
        let g = se2::compose(se2::compose(a, b), se2::inverse(b));
        prop_assert!(close(g, a, 1e-10));
    }

    /// Fore-aft mirror: swapping the joints swaps the columns, flips vx and
    /// the rotation rate and keeps vy.
    #[test]
    fn purcell_fore_aft_symmetry(p1 in -3.0..3.0f64, p2 in -3.0..3.0f64, cn in 1.2..4.0f64) {
        let p = PurcellParams { cn, ..PurcellParams::default() };
        let a = p.connection(p1, p2).unwrap();
        let m = p.connection(p2, p1).unwrap();
        for (r, sign) in [-1.0, 1.0, -1.0].into_iter().enumerate() {
            for j in 0..2 {
                prop_assert!((m[r][1 - j] - sign * a[r][j]).abs() < 1e-12, "row {} col {}", r, j);
            }
        }
    }

    #[test]
    fn hausdorff_is_a_symmetric_distance(
        pts in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..20),
        shift in -1.0..1.0f64,
    ) {
        let a: Vec<ShapePoint> = pts.iter().map(|&(x, y)| ShapePoint::new(x, y)).collect();
        let b: Vec<ShapePoint> = a.iter().map(|p| ShapePoint::new(p.phi1 + shift, p.phi2)).collect();
        prop_assert_eq!(hausdorff(&a, &a), 0.0);
        prop_assert_eq!(hausdorff(&a, &b), hausdorff(&b, &a));
        prop_assert!(hausdorff(&a, &b) <= shift.abs() + 1e-12);
    }

    #[test]
    fn reversing_a_polygon_flips_its_area(
        pts in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 3..12),
    ) {
        let a: Vec<ShapePoint> = pts.iter().map(|&(x, y)| ShapePoint::new(x, y)).collect();
        let mut r = a.clone();
        r.reverse();
        prop_assert!((polygon_area(&a) + polygon_area(&r)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// A gait and its reverse compose to the identity.
    #[test]
    fn reversed_gait_undoes_displacement(c1 in -1.0..1.0f64, c2 in -1.0..1.0f64, r in 0.1..1.5f64) {
        let sw = Swimmer::purcell_default();
        let opts = OdeOptions::with_tolerances(1e-11, 1e-13);
        let g = Gait::circle(ShapePoint::new(c1, c2), r);
        let f = integrate_gait_with(&sw, &g, SpeedProfile::Uniform, &opts).unwrap().displacement();
        let b = integrate_gait_with(&sw, &g.reversed(), SpeedProfile::Uniform, &opts).unwrap().displacement();
        prop_assert!(close(se2::compose(f, b), BodyPose::IDENTITY, 1e-7));
    }

    /// Displacement depends on the path only, not on the pacing.
    #[test]
    fn pacing_does_not_change_displacement(e in 0.2..2.0f64, power in 1.5..3.0f64) {
        let sw = Swimmer::purcell_default();
        let opts = OdeOptions::with_tolerances(1e-12, 1e-14);
        let g = Gait::square(ShapePoint::new(0.0, 0.0), e);
        let d = time_reparametrization_check(&sw, &g, SpeedProfile::Uniform, SpeedProfile::Power(power), &opts).unwrap();
        prop_assert!(d < 1e-8, "discrepancy {}", d);
    }
}
