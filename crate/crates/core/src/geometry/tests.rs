use super::*;
use crate::connection::{BodyFrameSpec, Window};
use crate::error::GaitError;
use crate::models::Swimmer;
use crate::simulate::Orientation;
use crate::types::ShapePoint;

fn purcell_frame() -> BodyFrameSpec {
    BodyFrameSpec::weighted([0.2166, 0.3917, 0.3917], [0.487, 0.2565, 0.2565]).unwrap()
}

fn synthetic(n: usize, half: f64, f: impl Fn(f64, f64) -> f64 + Sync) -> HeightField {
    HeightField::from_fn(Window::square(half), n, Component::X, |p| Ok(f(p.phi1, p.phi2))).unwrap()
}

#[test]
fn unit_circle_is_one_loop() {
    let field = synthetic(81, 2.0, |x, y| 1.0 - x * x - y * y);
    let set = extract_zero_contours(&field).unwrap();
    assert_eq!(set.contours.len(), 1);
    assert!(set.junctions.is_empty());
    let c = &set.contours[0];
    assert_eq!(c.kind, ContourKind::ClosedLoop);
    // positive inside, so the loop runs ccw
    assert!(c.area() > 0.0);
    let circle: Vec<ShapePoint> = (0..720)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 720.0;
            ShapePoint::new(a.cos(), a.sin())
        })
        .collect();
    let (h1, h2) = field.cell();
    assert!(hausdorff(&c.points, &circle) < h1.hypot(h2));
}

#[test]
fn saddle_has_one_junction() {
    // odd grid puts a node on the saddle, even grid a cell centre
    for n in [41, 42] {
        let field = synthetic(n, 1.0, |x, y| x * y);
        let set = extract_zero_contours(&field).unwrap();
        assert_eq!(set.junctions.len(), 1, "n = {n}: {:?}", set.junctions);
        let j = set.junctions[0];
        let (h1, _) = field.cell();
        assert!(j.point.norm() <= h1, "n = {n}: {:?}", j.point);
        assert_eq!(j.branches, 4);
        assert!(set.contours.iter().all(|c| c.kind == ContourKind::JunctionBearing));
    }
}

#[test]
fn no_sign_change_is_empty() {
    let field = synthetic(33, 1.0, |x, y| 1.0 + x * x + y * y);
    assert_eq!(extract_zero_contours(&field), Err(GaitError::EmptyContour));
}

#[test]
fn small_grid_rejected() {
    let r = HeightField::from_fn(Window::square(1.0), 32, Component::X, |_| Ok(0.0));
    assert!(matches!(r, Err(GaitError::InvalidParams(_))));
}

#[test]
fn contours_clipped_by_window_are_open() {
    let field = synthetic(41, 1.0, |x, _| x - 0.1);
    let set = extract_zero_contours(&field).unwrap();
    assert_eq!(set.contours.len(), 1);
    assert_eq!(set.contours[0].kind, ContourKind::Open);
    let r = contour_as_gait(&Swimmer::purcell_default(), &set.contours[0], &[], Orientation::Ccw, &Default::default());
    assert!(matches!(r, Err(GaitError::InvalidGait(_))));
}

#[test]
fn two_separate_loops_without_junction() {
    let field = synthetic(121, 3.0, |x, y| {
        let a = 0.5 - (x - 1.2).powi(2) - y * y;
        let b = 0.5 - (x + 1.2).powi(2) - y * y;
        a.max(b)
    });
    let set = extract_zero_contours(&field).unwrap();
    assert_eq!(set.loops().count(), 2);
    assert!(set.junctions.is_empty());
}

#[test]
fn purcell_field_symmetries() {
    let sw = Swimmer::purcell_default();
    let f = sample_height_field(&sw, &BodyFrameSpec::MiddleLink, Window::square(3.2), 65, Component::X).unwrap();
    let n = f.n;
    let (lo, hi) = f.range();
    for j in 0..n {
        for i in 0..n {
            let v = f.value(i, j);
            // point reflection through the origin and swapping the joints
            assert!((v - f.value(n - 1 - i, n - 1 - j)).abs() < 1e-9 * (hi - lo));
            assert!((v - f.value(j, i)).abs() < 1e-9 * (hi - lo));
        }
    }
    assert!(f.value(n / 2, n / 2) > 0.0);
}

#[test]
fn purcell_inner_loop_encloses_positive_lobe() {
    let sw = Swimmer::purcell_default();
    let f = sample_height_field(&sw, &purcell_frame(), Window::square(3.2), 101, Component::X).unwrap();
    let set = extract_zero_contours(&f).unwrap();
    let inner = set.innermost_around(ShapePoint::new(0.0, 0.0)).unwrap();
    assert_eq!(inner.kind, ContourKind::ClosedLoop);
    assert!(inner.area() > 0.0);
    assert!(set.junctions.is_empty());
}

#[test]
fn refined_vertices_sit_on_the_level_set() {
    let sw = Swimmer::purcell_default();
    let model = crate::connection::Framed::new(&sw, purcell_frame());
    let f = sample_height_field(&sw, &purcell_frame(), Window::square(3.2), 81, Component::X).unwrap();
    let set = extract_zero_contours(&f).unwrap();
    let mut inner = set.innermost_around(ShapePoint::new(0.0, 0.0)).unwrap().clone();
    refine_contour(&model, Component::X, &mut inner, 1e-6).unwrap();
    let (lo, hi) = f.range();
    for p in &inner.points {
        assert!(height_at(&model, Component::X, *p).unwrap().abs() < 1e-3 * (hi - lo));
    }
}

#[test]
fn reversed_contour_gait_inverts_displacement() {
    let sw = Swimmer::purcell_default();
    let f = sample_height_field(&sw, &purcell_frame(), Window::square(3.2), 65, Component::X).unwrap();
    let set = extract_zero_contours(&f).unwrap();
    let inner = set.innermost_around(ShapePoint::new(0.0, 0.0)).unwrap();
    let opts = ContourGaitOptions { max_vertices: 64, ..Default::default() };
    let ccw = contour_as_gait(&sw, inner, &set.junctions, Orientation::Ccw, &opts).unwrap();
    let cw = contour_as_gait(&sw, inner, &set.junctions, Orientation::Cw, &opts).unwrap();
    assert!(ccw.simulated.x > 0.0);
    let round = crate::se2::compose(ccw.simulated, cw.simulated);
    assert!(round.x.abs().max(round.y.abs()).max(round.theta.abs()) < 1e-7);
}

#[test]
fn junction_bearing_loop_rejected() {
    let field = synthetic(61, 1.0, |x, y| x * y);
    let set = extract_zero_contours(&field).unwrap();
    let c = &set.contours[0];
    let r = contour_as_gait(&Swimmer::purcell_default(), c, &set.junctions, Orientation::Ccw, &Default::default());
    assert!(matches!(r, Err(GaitError::JunctionBearing(..))));
}

#[test]
fn hausdorff_of_offset_squares() {
    let sq = |d: f64| vec![
        ShapePoint::new(d, d),
        ShapePoint::new(1.0 + d, d),
        ShapePoint::new(1.0 + d, 1.0 + d),
        ShapePoint::new(d, 1.0 + d),
    ];
    assert!(hausdorff(&sq(0.0), &sq(0.0)) < 1e-15);
    assert!((hausdorff(&sq(0.0), &sq(0.1)) - 0.1 * 2f64.sqrt()).abs() < 1e-12);
}

