use std::io::Write;

use gaitforge_core::config::FrameChoice;
use gaitforge_core::connection::{Framed, Window};
use gaitforge_core::geometry::Component;
use gaitforge_core::pmp::{shoot_bounded, shoot_unbounded, ArcKind, Branch, Diagnostics, PmpOptions, PmpSolution, Segment};
use gaitforge_core::{GaitError, ShapePoint};
use serde::Serialize;

use crate::args::{FieldArgs, PmpArgs, ScanArgs};
use crate::heightfield::{compute, default_window, field_plot};
use crate::io::{write_json, write_text, write_with, xy};
use crate::svg::{Plot, GREY, PURPLE, RED};
use crate::{CliError, CliResult, ModelInfo, Setup, Status, SCHEMA_VERSION};

/// Grid of the height field drawn under `--overlay-heightfield`.
const OVERLAY_GRID: usize = 201;

pub fn options(scan: &ScanArgs) -> PmpOptions {
    let mut o = PmpOptions::default();
    o.scan = (scan.scan_min.unwrap_or(o.scan.0), scan.scan_max.unwrap_or(o.scan.1));
    o.scan_step = scan.scan_step.unwrap_or(o.scan_step);
    o
}

/// Errors that are a solver outcome rather than a misuse.
pub fn is_nonconvergence(e: &GaitError) -> bool {
    !matches!(e, GaitError::InvalidParams(_) | GaitError::Config(_))
}

#[derive(Serialize)]
struct PmpReport {
    schema_version: u32,
    model: ModelInfo,
    branch: Branch,
    bound: Option<f64>,
    /// The singular arc never reached the bound, so the unbounded problem was solved instead.
    bound_inactive: bool,
    converged: bool,
    error: Option<String>,
    phi1_0: Option<f64>,
    lambda3_0: Option<f64>,
    tau1: Option<f64>,
    tau2: Option<f64>,
    tf: Option<f64>,
    dx: Option<f64>,
    dy: Option<f64>,
    dtheta: Option<f64>,
    segments: Vec<Segment>,
    residuals: Option<Diagnostics>,
}

/// Bounded shooting, or unbounded when the bound is `None` or never touched.
pub fn solve<M: gaitforge_core::models::ConnectionModel>(
    model: &M,
    bound: Option<f64>,
    branch: Branch,
    opts: &PmpOptions,
) -> (Result<PmpSolution, GaitError>, bool) {
    match bound {
        None => (shoot_unbounded(model, branch, opts), false),
        Some(b) => match shoot_bounded(model, b, branch, opts) {
            Err(GaitError::BoundNeverReached(_)) => (shoot_unbounded(model, branch, opts), true),
            r => (r, false),
        },
    }
}

pub fn run(a: &PmpArgs) -> CliResult<Status> {
    let setup = Setup::new(&a.common, FrameChoice::MiddleLink)?;
    let model = Framed::new(&setup.swimmer, setup.frame);
    let opts = options(&a.scan);
    let (result, bound_inactive) = solve(&model, a.bound.0, a.branch, &opts);
    let mut report = PmpReport {
        schema_version: SCHEMA_VERSION,
        model: setup.info(),
        branch: a.branch,
        bound: a.bound.0,
        bound_inactive,
        converged: false,
        error: None,
        phi1_0: None,
        lambda3_0: None,
        tau1: None,
        tau2: None,
        tf: None,
        dx: None,
        dy: None,
        dtheta: None,
        segments: Vec::new(),
        residuals: None,
    };
    let sol = match result {
        Ok(s) => s,
        Err(e) if is_nonconvergence(&e) => {
            report.error = Some(e.to_string());
            write_json(&setup.path("pmp.json"), &report)?;
            return Ok(Status::NotConverged);
        }
        Err(e) => return Err(CliError::from(e)),
    };
    write_with(&setup.path("gait.csv"), |w| write_gait_csv(w, &sol.gait_points()))?;
    write_with(&setup.path("costate.csv"), |w| write_costate_csv(w, &sol))?;
    let mut plot = if a.overlay_heightfield {
        let field_setup = Setup { frame: FrameChoice::Optimized.resolve(&setup.swimmer)?, ..setup.clone() };
        let reach = sol.gait_points().iter().fold(0.0f64, |m, p| m.max(p.phi1.abs()).max(p.phi2.abs()));
        let half = default_window(&setup.swimmer).phi1.1.max(1.05 * reach);
        let field_args = FieldArgs { window: Some(Window::square(half)), grid: Some(OVERLAY_GRID) };
        field_plot(&compute(&field_setup, &field_args, Component::X)?)
    } else {
        shape_plot(&[&sol])
    };
    draw_solution(&mut plot, &sol, color(a.branch), &label(&sol));
    write_text(&setup.path("pmp.svg"), &plot.render("PMP gait", "phi1 (rad)", "phi2 (rad)"))?;
    report.converged = true;
    report.phi1_0 = Some(sol.phi1_0);
    report.lambda3_0 = Some(sol.lambda3_0);
    report.tau1 = sol.tau1;
    report.tau2 = sol.tau2;
    report.tf = Some(sol.tf);
    report.dx = Some(sol.displacement.x);
    report.dy = Some(sol.displacement.y);
    report.dtheta = Some(sol.displacement.theta);
    report.segments = sol.segments.clone();
    report.residuals = Some(sol.diagnostics);
    write_json(&setup.path("pmp.json"), &report)?;
    Ok(Status::Success)
}

pub fn color(branch: Branch) -> &'static str {
    match branch {
        Branch::Forward => PURPLE,
        Branch::Reverse => RED,
    }
}

pub fn label(sol: &PmpSolution) -> String {
    let name = match sol.branch {
        Branch::Forward => "forward",
        Branch::Reverse => "reverse",
    };
    match sol.bound {
        Some(b) => format!("{name}, b = {b}, dx = {:.4}", sol.displacement.x),
        None => format!("{name}, dx = {:.4}", sol.displacement.x),
    }
}

/// Plain shape-space axes fitted around the gaits, with bound lines.
pub fn shape_plot(sols: &[&PmpSolution]) -> Plot {
    let mut r = 1.0f64;
    for s in sols {
        for p in s.gait_points() {
            r = r.max(p.phi1.abs()).max(p.phi2.abs());
        }
        if let Some(b) = s.bound {
            r = r.max(b);
        }
    }
    let r = 1.1 * r;
    let mut p = Plot::shape_space((-r, r), (-r, r));
    p.line(&[(-r, -r), (r, r)], GREY, 0.8, true, false);
    p.line(&[(-r, r), (r, -r)], GREY, 0.8, true, false);
    p
}

pub fn draw_solution(p: &mut Plot, sol: &PmpSolution, color: &str, label: &str) {
    p.line(&xy(&sol.gait_points()), color, 2.2, false, true);
    if let Some(b) = sol.bound {
        for (a, c) in [((b, -b), (b, b)), ((-b, -b), (-b, b)), ((-b, b), (b, b)), ((-b, -b), (b, -b))] {
            p.line(&[a, c], GREY, 1.0, true, false);
        }
    }
    let start = sol.gait_points()[0];
    p.marker((start.phi1, start.phi2), color, None);
    p.legend(label, color, false);
}

/// Closed gait with cumulative arc length; the first point is repeated at the end.
pub fn write_gait_csv<W: Write>(w: &mut W, pts: &[ShapePoint]) -> std::io::Result<()> {
    writeln!(w, "s,phi1,phi2")?;
    let mut s = 0.0;
    let mut prev = pts[0];
    for &p in pts.iter().chain(std::iter::once(&pts[0])) {
        s += prev.dist(p);
        prev = p;
        writeln!(w, "{s},{},{}", p.phi1, p.phi2)?;
    }
    Ok(())
}

fn write_costate_csv<W: Write>(w: &mut W, sol: &PmpSolution) -> std::io::Result<()> {
    writeln!(w, "t,arc,phi1,phi2,theta,lambda1,lambda2,lambda3")?;
    for arc in &sol.arcs {
        let kind = match arc.kind {
            ArcKind::Singular => "singular",
            ArcKind::Bound => "bound",
        };
        for (t, s) in arc.t.iter().zip(&arc.states) {
            writeln!(w, "{t},{kind},{},{},{},{},{},{}", s.phi1, s.phi2, s.theta, s.lambda1, s.lambda2, s.lambda3)?;
        }
    }
    Ok(())
}
