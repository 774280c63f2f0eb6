//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines show up in plain
//! `cargo test` output. The process fails when a criterion outside
//! `EXPECTED_FAILURES` fails, or when an expected failure starts passing
//! (so the list cannot go stale).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use gaitforge_core::config::optimized_frame;
use gaitforge_core::connection::{cbvi, lie_bracket, BodyFrameSpec, Framed, Window, CBVI_TOLERANCE};
use gaitforge_core::geometry::{
    contour_as_gait, extract_zero_contours, hausdorff, sample_height_field, Component, ContourGaitOptions, ContourKind,
    ContourSet,
};
use gaitforge_core::models::{link_placements, ConnectionModel, PurcellParams, Swimmer};
use gaitforge_core::ode::OdeOptions;
use gaitforge_core::pmp::{
    select_branch, shoot_bounded, shoot_unbounded, unbounded_candidates, ArcKind, Branch, Local, PmpOptions, PmpSolution,
};
use gaitforge_core::simulate::{
    displacement_sweep, eps_grid, integrate_gait, integrate_gait_with, time_reparametrization_check, Gait, GaitFamily,
    Orientation, SpeedProfile,
};
use gaitforge_core::{se2, GaitError, LocalConnection, ShapePoint};
use gaitforge_oracles::{
    oracle_commutator, oracle_costate_gradient, oracle_perfect_fluid_connection, oracle_purcell_connection,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria known to fail with the default parameters; the README explains
/// each one.
const EXPECTED_FAILURES: &[&str] = &["3", "6"];

const SEED: u64 = 20240601;

// 1
const ORACLE_POINTS: usize = 500;
const ORACLE_TOL: f64 = 1e-6;
// 2
const STOKES_CASES: [(f64, f64); 3] = [(0.2, 0.02), (0.5, 0.05), (1.0, 0.10)];
const CIRCLE_VERTICES: usize = 1024;
// 4
const HAUSDORFF_TOL: f64 = 0.05;
// 5
const BOUNDS: [f64; 3] = [3.1, 3.2, 3.6];
/// Largest bound that still converges and the smallest that fails, both at
/// the default scan step.
const LAST_CONVERGED_BOUND: f64 = 5.7;
const FIRST_FAILED_BOUND: f64 = 5.75;
const CORNER_TOL: f64 = 1e-8;
// 7
const NECESSARY_TOL: f64 = 1e-6;
const LAMBDA3_TOL: f64 = 1e-8;
const COSTATE_POINTS: usize = 100;
const COSTATE_REL_TOL: f64 = 1e-5;
const FD_STEP: f64 = 1e-5;
// 8
const REPARAM_TOL: f64 = 1e-8;
const ROUND_TRIP_TOL: f64 = 1e-7;
const ISOTROPIC_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn fail<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> String + '_ {
    move |e| format!("{what}: {e}")
}

fn purcell() -> Swimmer {
    Swimmer::purcell_default()
}

fn fluid(eta: f64) -> Swimmer {
    Swimmer::perfect_fluid(eta, 0.2)
}

fn purcell_candidates() -> &'static Result<Vec<PmpSolution>, GaitError> {
    static C: OnceLock<Result<Vec<PmpSolution>, GaitError>> = OnceLock::new();
    C.get_or_init(|| unbounded_candidates(&purcell(), &PmpOptions::default()))
}

fn bounded(b: f64) -> &'static Result<PmpSolution, GaitError> {
    static C: OnceLock<BTreeMap<u64, Result<PmpSolution, GaitError>>> = OnceLock::new();
    let map = C.get_or_init(|| {
        BOUNDS
            .iter()
            .map(|&b| (b.to_bits(), shoot_bounded(&purcell(), b, Branch::Reverse, &PmpOptions::default())))
            .collect()
    });
    &map[&b.to_bits()]
}

fn fluid_forward() -> &'static Result<PmpSolution, GaitError> {
    static C: OnceLock<Result<PmpSolution, GaitError>> = OnceLock::new();
    C.get_or_init(|| shoot_unbounded(&fluid(1.0 / 3.0), Branch::Forward, &PmpOptions::default()))
}

/// Zero set of the x height function in the minimum-perturbation frame.
fn zero_set(sw: &Swimmer, half: f64, n: usize) -> Result<ContourSet, String> {
    let frame = optimized_frame(sw).map_err(fail("frame"))?.frame;
    let field = sample_height_field(sw, &frame, Window::square(half), n, Component::X).map_err(fail("field"))?;
    extract_zero_contours(&field).map_err(fail("contours"))
}

fn max_abs_diff(a: &[[f64; 2]; 3], b: &[[f64; 2]; 3]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let pi = std::f64::consts::PI;
    let Swimmer::Purcell(pp) = purcell() else { unreachable!() };
    let Swimmer::PerfectFluid(fp) = fluid(1.0 / 3.0) else { unreachable!() };
    let (mut ep, mut ef) = (0.0f64, 0.0f64);
    for _ in 0..ORACLE_POINTS {
        let phi = [rng.gen_range(-pi..pi), rng.gen_range(-pi..pi)];
        let theta = rng.gen_range(-pi..pi);
        let k = pp.connection(phi[0], phi[1]).map_err(fail("purcell"))?;
        ep = ep.max(max_abs_diff(&k, &oracle_purcell_connection(pp.lengths(), pp.ct, pp.cn, phi, theta).value));
        let k = fp.connection(phi[0], phi[1]).map_err(fail("perfect fluid"))?;
        ef = ef.max(max_abs_diff(&k, &oracle_perfect_fluid_connection(fp.a, fp.b, fp.rho, phi, theta).value));
    }
    // the comparison must notice a 1 % change in one drag coefficient
    let skewed = PurcellParams { cn: pp.cn * 1.01, ..pp };
    let phi = [0.8, -0.4];
    let injected = max_abs_diff(
        &skewed.connection(phi[0], phi[1]).map_err(fail("purcell"))?,
        &oracle_purcell_connection(pp.lengths(), pp.ct, pp.cn, phi, 0.0).value,
    );
    let detail = format!("max error purcell {ep:.2e}, perfect fluid {ef:.2e}; injected drag error {injected:.2e}");
    if ep < ORACLE_TOL && ef < ORACLE_TOL && injected > ORACLE_TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_2() -> Outcome {
    let sw = purcell();
    let opt = optimized_frame(&sw).map_err(fail("frame"))?.frame;
    let ode = OdeOptions::with_tolerances(1e-11, 1e-13);
    let rel_error = |frame: BodyFrameSpec, eps: f64| -> Result<f64, String> {
        let gait = Gait::circle(ShapePoint::new(0.0, 0.0), eps);
        let exact = integrate_gait(&sw, &gait, &frame, &ode).map_err(fail("line integral"))?.displacement().x;
        let model = Framed::new(&sw, frame);
        let est = cbvi(&model, &gait.boundary(CIRCLE_VERTICES), CBVI_TOLERANCE).map_err(fail("cbvi"))?.displacement().x;
        Ok((est - exact).abs() / exact.abs())
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for (eps, tol) in STOKES_CASES {
        let (e_opt, e_mid) = (rel_error(opt, eps)?, rel_error(BodyFrameSpec::MiddleLink, eps)?);
        ok &= e_opt < tol && e_mid > e_opt;
        parts.push(format!("eps {eps}: {:.3}% vs middle-link {:.3}%", 100.0 * e_opt, 100.0 * e_mid));
    }
    let detail = parts.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_3() -> Outcome {
    let sw = purcell();
    let eps = eps_grid(0.01, std::f64::consts::PI, 0.01).map_err(fail("grid"))?;
    let mut ok = true;
    let mut parts = Vec::new();
    for family in [GaitFamily::Circle, GaitFamily::Square] {
        let s = displacement_sweep(&sw, family, &eps, &BodyFrameSpec::MiddleLink, &OdeOptions::default())
            .map_err(fail("sweep"))?;
        let shape = s.dx_sign_changes() == 1 && s.max.interior && s.min.interior && s.max.dx > 0.0 && s.min.dx < 0.0;
        ok &= shape;
        parts.push(format!(
            "{}: {} sign change(s), max {:.4} at {:.3}{}, min {:.4} at {:.3}{}",
            family.name(),
            s.dx_sign_changes(),
            s.max.dx,
            s.max.eps,
            if s.max.interior { "" } else { " (boundary)" },
            s.min.dx,
            s.min.eps,
            if s.min.interior { "" } else { " (boundary)" },
        ));
    }
    let detail = parts.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn inner_match(sol: &PmpSolution, set: &ContourSet) -> Result<f64, String> {
    let inner = set.innermost_around(ShapePoint::new(0.0, 0.0)).ok_or("no contour around the origin")?;
    if inner.kind != ContourKind::ClosedLoop {
        return Err(format!("inner contour is {:?}", inner.kind));
    }
    Ok(hausdorff(&sol.gait_points(), &inner.points))
}

fn criterion_4() -> Outcome {
    let candidates = purcell_candidates().as_ref().map_err(fail("purcell candidates"))?;
    let p = select_branch(candidates.clone(), Branch::Forward, &PmpOptions::default()).map_err(fail("purcell forward"))?;
    let dp = inner_match(&p, &zero_set(&purcell(), 3.2, 401)?)?;
    let f = fluid_forward().as_ref().map_err(fail("perfect fluid forward"))?;
    let df = inner_match(f, &zero_set(&fluid(1.0 / 3.0), 6.0, 601)?)?;
    let detail = format!(
        "purcell dx {:.4}, Hausdorff {dp:.4}; perfect fluid dx {:.4}, Hausdorff {df:.4}",
        p.displacement.x, f.displacement.x
    );
    if dp < HAUSDORFF_TOL && df < HAUSDORFF_TOL && p.displacement.x > 0.0 && f.displacement.x > 0.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let reverse = match purcell_candidates() {
        Ok(c) => select_branch(c.clone(), Branch::Reverse, &PmpOptions::default()),
        Err(e) => Err(e.clone()),
    };
    match &reverse {
        Err(e @ (GaitError::NoBracket { .. } | GaitError::SingularArcBreakdown { .. })) => {
            parts.push(format!("unbounded reverse fails ({e})"))
        }
        other => {
            ok = false;
            parts.push(format!("unbounded reverse gave {:?}", other.as_ref().map(|s| s.displacement.x)));
        }
    }
    for b in BOUNDS {
        match bounded(b) {
            Ok(s) => {
                let has_bound = s.segments.iter().any(|g| g.kind == ArcKind::Bound);
                let corner = s.arcs.iter().flat_map(|a| &a.states).any(|st| (st.phi2 - b).abs() < CORNER_TOL);
                ok &= s.displacement.x < 0.0 && has_bound && corner;
                parts.push(format!("b = {b}: dx {:.4}, bound arc {has_bound}, corner {corner}", s.displacement.x));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("b = {b}: {e}"));
            }
        }
    }
    let opts = PmpOptions::default();
    let last = shoot_bounded(&purcell(), LAST_CONVERGED_BOUND, Branch::Reverse, &opts);
    let first = shoot_bounded(&purcell(), FIRST_FAILED_BOUND, Branch::Reverse, &opts);
    let threshold = last.is_ok() && matches!(first, Err(GaitError::NoRoot(_) | GaitError::NoBracket { .. }));
    ok &= threshold;
    parts.push(format!(
        "b = {LAST_CONVERGED_BOUND} {}, b = {FIRST_FAILED_BOUND} {}",
        if last.is_ok() { "converges" } else { "fails" },
        match &first {
            Ok(_) => "converges".to_string(),
            Err(e) => format!("fails ({e})"),
        }
    ));
    let detail = parts.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    let third = zero_set(&fluid(1.0 / 3.0), 6.0, 601)?;
    let bearing: Vec<_> = third.contours.iter().filter(|c| c.kind == ContourKind::JunctionBearing).collect();
    let rejected = bearing.first().is_some_and(|c| {
        matches!(
            contour_as_gait(&fluid(1.0 / 3.0), c, &third.junctions, Orientation::Ccw, &ContourGaitOptions::default()),
            Err(GaitError::JunctionBearing(..))
        )
    });
    let ok_third = !third.junctions.is_empty() && rejected;
    parts.push(format!(
        "eta 1/3: {} junction(s), {} junction-bearing contour(s), rejected {rejected}",
        third.junctions.len(),
        bearing.len()
    ));
    let sw = fluid(0.5);
    let half = zero_set(&sw, 6.0, 601)?;
    let loops = half.loops().count();
    let signs: Vec<f64> = match unbounded_candidates(&sw, &PmpOptions::default()) {
        Ok(c) => c.iter().map(|s| s.displacement.x).collect(),
        Err(_) => Vec::new(),
    };
    let opposite = signs.iter().any(|d| *d > 0.0) && signs.iter().any(|d| *d < 0.0);
    let ok_half = loops >= 2 && half.junctions.is_empty() && opposite;
    parts.push(format!(
        "eta 1/2: {loops} junction-free loop(s), {} junction(s), unbounded extremals dx {signs:.4?}",
        half.junctions.len()
    ));
    let detail = parts.join("; ");
    if ok_third && ok_half {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// `-dH/dz` by central differences against the kernel's costate rate.
fn costate_error<M: ConnectionModel>(model: &M, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for _ in 0..COSTATE_POINTS {
        let z = [rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5), rng.gen_range(-3.0..3.0)];
        let lam = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let u = [a.cos(), a.sin()];
        let kappa = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let h = |z: &[f64; 3]| {
            let c = model.connection(ShapePoint::new(z[0], z[1])).unwrap().0;
            let (s, co) = z[2].sin_cos();
            let g = kappa * (co * c[0][0] - s * c[1][0]);
            let hh = kappa * (co * c[0][1] - s * c[1][1]);
            g * u[0] + hh * u[1] + lam[0] * u[0] + lam[1] * u[1] + lam[2] * (c[2][0] * u[0] + c[2][1] * u[1])
        };
        let oracle = oracle_costate_gradient(h, &z, FD_STEP).value;
        let kernel = Local::at(model, z, kappa).map_err(fail("local"))?.costate_rate(lam[2], u);
        let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = (0..3).map(|i| (oracle[i] - kernel[i]).abs()).fold(0.0, f64::max);
        worst = worst.max(diff / scale.max(1e-300));
    }
    Ok(worst)
}

fn criterion_7() -> Outcome {
    let candidates = purcell_candidates().as_ref().map_err(fail("purcell candidates"))?;
    let forward = select_branch(candidates.clone(), Branch::Forward, &PmpOptions::default()).map_err(fail("forward"))?;
    let mut sols: Vec<(String, &PmpSolution)> = vec![("purcell forward".into(), &forward)];
    if let Ok(f) = fluid_forward() {
        sols.push(("perfect fluid forward".into(), f));
    }
    for b in BOUNDS {
        if let Ok(s) = bounded(b) {
            sols.push((format!("purcell b = {b}"), s));
        }
    }
    let mut ok = true;
    let mut worst = [0.0f64; 5];
    for (name, s) in &sols {
        let d = s.diagnostics;
        let vals = [d.max_h_u, d.max_psi, d.h_drift, d.h_jump, d.lambda3_tf.abs()];
        let pass = vals[..4].iter().all(|v| *v < NECESSARY_TOL) && vals[4] < LAMBDA3_TOL;
        if !pass {
            ok = false;
            eprintln!("  {name}: {d:?}");
        }
        for k in 0..5 {
            worst[k] = worst[k].max(vals[k]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let ep = costate_error(&purcell(), &mut rng)?;
    let ef = costate_error(&fluid(1.0 / 3.0), &mut rng)?;
    ok &= ep < COSTATE_REL_TOL && ef < COSTATE_REL_TOL;
    let detail = format!(
        "{} solutions: |H_u| {:.1e}, |psi| {:.1e}, drift {:.1e}, jump {:.1e}, |lambda3(tf)| {:.1e}; costate rel error {ep:.1e} / {ef:.1e}",
        sols.len(),
        worst[0],
        worst[1],
        worst[2],
        worst[3],
        worst[4]
    );
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Circles and squares about the origin, then two off-centre gaits. The flag
/// marks the centred ones.
fn test_gaits() -> Vec<(Gait, bool)> {
    let o = ShapePoint::new(0.0, 0.0);
    let mut v = Vec::new();
    for e in [0.3, 1.0, 2.0] {
        v.push((Gait::circle(o, e), true));
        v.push((Gait::square(o, e), true));
    }
    v.push((Gait::circle(ShapePoint::new(0.6, -0.4), 0.8), false));
    let triangle = vec![ShapePoint::new(0.0, 0.0), ShapePoint::new(1.5, 0.2), ShapePoint::new(0.4, 1.3)];
    v.push((Gait::polyline(triangle).unwrap(), false));
    v
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut theta_max = 0.0f64;
    let mut comm_err = 0.0f64;
    for _ in 0..200 {
        let a: [[f64; 2]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-2.0..2.0)));
        let b = lie_bracket(&LocalConnection(a));
        theta_max = theta_max.max(b[2].abs());
        let o = oracle_commutator(&a).value;
        comm_err = comm_err.max((0..3).map(|i| (o[i] - b[i]).abs()).fold(0.0, f64::max));
    }
    let sw = purcell();
    let ode = OdeOptions::with_tolerances(1e-12, 1e-14);
    let (mut reparam, mut round) = (0.0f64, 0.0f64);
    for (g, _) in test_gaits() {
        for profile in [SpeedProfile::QuadraticEase, SpeedProfile::Power(2.0)] {
            reparam = reparam.max(
                time_reparametrization_check(&sw, &g, SpeedProfile::Uniform, profile, &ode).map_err(fail("reparametrization"))?,
            );
        }
        let fwd = integrate_gait_with(&sw, &g, SpeedProfile::Uniform, &ode).map_err(fail("ccw"))?.displacement();
        let back = integrate_gait_with(&sw, &g.reversed(), SpeedProfile::Uniform, &ode).map_err(fail("cw"))?.displacement();
        round = round.max(se2::pose_error(se2::compose(fwd, back), gaitforge_core::BodyPose::IDENTITY));
    }
    // Isotropic drag pins the length-weighted centroid in the world. Gaits
    // symmetric under the fore-aft mirror also cancel rotation, so they cannot
    // move; off-centre gaits can still rotate the frame about the centroid.
    let iso_params = PurcellParams { cn: 1.0, ct: 1.0, ..PurcellParams::default() };
    let iso = Swimmer::Purcell(iso_params);
    let (mut iso_max, mut centroid) = (0.0f64, 0.0f64);
    for (g, centred) in test_gaits() {
        let d = integrate_gait_with(&iso, &g, SpeedProfile::Uniform, &ode).map_err(fail("isotropic"))?.displacement();
        let start = g.point(0.0);
        let links = link_placements(iso_params.lengths(), start.phi1, start.phi2);
        let total: f64 = iso_params.lengths().iter().sum();
        let ox = links.iter().zip(iso_params.lengths()).map(|(p, l)| l * p.x).sum::<f64>() / total;
        let oy = links.iter().zip(iso_params.lengths()).map(|(p, l)| l * p.y).sum::<f64>() / total;
        let (s, c) = d.theta.sin_cos();
        centroid = centroid.max((d.x + c * ox - s * oy - ox).abs()).max((d.y + s * ox + c * oy - oy).abs());
        if centred {
            iso_max = iso_max.max(d.x.abs()).max(d.y.abs());
        }
    }
    let detail = format!(
        "bracket theta {theta_max:.1e} (oracle {comm_err:.1e}); reparametrization {reparam:.1e}; cw/ccw {round:.1e}; isotropic {iso_max:.1e} (centroid drift {centroid:.1e})"
    );
    if theta_max == 0.0
        && comm_err < 1e-12
        && reparam < REPARAM_TOL
        && round < ROUND_TRIP_TOL
        && iso_max < ISOTROPIC_TOL
        && centroid < ISOTROPIC_TOL
    {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if matches!(p.extension().and_then(|x| x.to_str()), Some("csv" | "json")) {
            out.insert(p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap());
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let root = std::env::temp_dir().join(format!("gaitforge-accept-{}", std::process::id()));
    let config = root.join("fluid.toml");
    std::fs::create_dir_all(&root).map_err(fail("tmp"))?;
    std::fs::write(&config, "model = \"perfect_fluid\"\neta = 0.3333333333333333\nseed = 11\n").map_err(fail("config"))?;
    let cfg = config.to_string_lossy().into_owned();
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("sweep", vec!["sweep", "--eps-step", "0.1"]),
        ("heightfield", vec!["heightfield", "--grid", "65", "--curvature"]),
        ("heightfield-fluid", vec!["heightfield", "--model-config", &cfg, "--grid", "81"]),
        ("pmp", vec!["pmp", "--scan-min", "1.2", "--scan-max", "1.6"]),
        ("pmp-failed", vec!["pmp", "--branch", "reverse", "--scan-min", "1.2", "--scan-max", "1.6"]),
        ("compare", vec!["compare", "--grid", "81", "--scan-min", "1.2", "--scan-max", "1.6"]),
    ];
    let mut checked = 0;
    for (name, args) in &runs {
        let mut snaps = Vec::new();
        for (k, threads) in ["1", "3"].iter().enumerate() {
            let out: PathBuf = root.join(format!("{name}-{k}"));
            let status = Command::new(env!("CARGO_BIN_EXE_gaitforge"))
                .args(args)
                .arg("--out")
                .arg(&out)
                .env("GAITFORGE_THREADS", threads)
                .output()
                .map_err(fail("spawn"))?;
            if !matches!(status.status.code(), Some(0 | 1)) {
                return Err(format!("{name}: exit {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)));
            }
            snaps.push(snapshot(&out));
        }
        if snaps[0].is_empty() || snaps[0] != snaps[1] {
            let _ = std::fs::remove_dir_all(&root);
            return Err(format!("{name}: outputs differ between runs"));
        }
        checked += snaps[0].len();
    }
    let _ = std::fs::remove_dir_all(&root);
    Ok(format!("{} commands, {checked} CSV/JSON files byte-identical across runs with 1 and 3 threads", runs.len()))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 9] = [
        ("1", "model cross-validation", criterion_1),
        ("2", "Stokes consistency", criterion_2),
        ("3", "displacement sweep shape", criterion_3),
        ("4", "forward optimal gait, both methods", criterion_4),
        ("5", "reverse gait requires bounds", criterion_5),
        ("6", "perfect-fluid topology transition", criterion_6),
        ("7", "necessary conditions", criterion_7),
        ("8", "geometric invariants", criterion_8),
        ("9", "determinism", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let t = Instant::now();
        let r = run();
        let secs = t.elapsed().as_secs_f64();
        let expected_fail = EXPECTED_FAILURES.contains(&id);
        let (tag, detail) = match &r {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        let note = match (r.is_ok(), expected_fail) {
            (false, true) => " [expected]",
            (true, true) => " [expected to fail, now passes]",
            _ => "",
        };
        println!("criterion {id} ({name}): {tag}{note} in {secs:.1}s: {detail}");
        if r.is_ok() == expected_fail {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
