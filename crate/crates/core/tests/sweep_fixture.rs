//! Sweep extrema against the recorded fixture.

use gaitforge_core::connection::BodyFrameSpec;
use gaitforge_core::models::Swimmer;
use gaitforge_core::ode::OdeOptions;
use gaitforge_core::simulate::{displacement_sweep, eps_grid, Extremum, GaitFamily, Sweep};
use serde::Deserialize;

#[derive(Deserialize)]
struct Pair {
    max: Extremum,
    min: Extremum,
}

#[derive(Deserialize)]
struct MinOnly {
    min: Extremum,
}

#[derive(Deserialize)]
struct Fixture {
    grid_step: f64,
    circle: Pair,
    square: Pair,
    circle_to_4: MinOnly,
}

fn fixture() -> Fixture {
    serde_json::from_str(include_str!("fixtures/sweep_extrema.json")).unwrap()
}

fn sweep(family: GaitFamily, stop: f64, step: f64) -> Sweep {
    let eps = eps_grid(0.01, stop, step).unwrap();
    displacement_sweep(&Swimmer::purcell_default(), family, &eps, &BodyFrameSpec::MiddleLink, &OdeOptions::default())
        .unwrap()
}

fn assert_close(got: &Extremum, want: &Extremum) {
    assert_eq!(got.interior, want.interior, "{got:?} vs {want:?}");
    assert!((got.eps - want.eps).abs() < 1e-6, "{got:?} vs {want:?}");
    assert!((got.dx - want.dx).abs() < 1e-6 * want.dx.abs(), "{got:?} vs {want:?}");
}

#[test]
fn extrema_match_fixture() {
    let f = fixture();
    let pi = std::f64::consts::PI;
    for (family, want) in [(GaitFamily::Circle, &f.circle), (GaitFamily::Square, &f.square)] {
        let s = sweep(family, pi, f.grid_step);
        assert_eq!(s.dx_sign_changes(), 1);
        assert_close(&s.max, &want.max);
        assert_close(&s.min, &want.min);
    }
}

/// The circle minimum sits just past pi.
#[test]
fn circle_minimum_beyond_pi() {
    let f = fixture();
    let s = sweep(GaitFamily::Circle, 4.0, f.grid_step);
    assert_close(&s.min, &f.circle_to_4.min);
    assert!(s.min.eps > std::f64::consts::PI);
}
