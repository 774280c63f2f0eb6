use gaitforge_core::config::FrameChoice;
use gaitforge_core::connection::{polygon_area, BodyFrameSpec, Framed, Window};
use gaitforge_core::geometry::{contour_as_gait, hausdorff, Component, ContourGaitOptions, ContourKind, ContourSet, Junction};
use gaitforge_core::models::ConnectionModel;
use gaitforge_core::pmp::{select_branch, unbounded_candidates, Branch, PmpSolution};
use gaitforge_core::simulate::Orientation;
use gaitforge_core::{BodyPose, GaitError, ShapePoint};
use serde::Serialize;

use crate::args::{CompareArgs, FieldArgs};
use crate::heightfield::{compute, default_grid, default_window, field_plot, summarize, ContourSummary};
use crate::io::{write_json, write_text};
use crate::pmp::{color, draw_solution, is_nonconvergence, label, options, solve};
use crate::{CliError, CliResult, ModelInfo, Setup, Status, SCHEMA_VERSION};

/// A PMP gait within this Hausdorff distance (rad) of its contour agrees with it.
pub const AGREEMENT_DISTANCE: f64 = 0.05;
/// Contours further than this from a gait are not offered as its match.
pub const MATCH_DISTANCE: f64 = 0.5;

#[derive(Serialize)]
struct ContourMatch {
    contour: usize,
    kind: ContourKind,
    hausdorff: f64,
    agrees: bool,
    /// The contour run as a gait in the PMP frame from the vertex nearest the
    /// PMP start, when it is a junction-free loop.
    simulated: Option<BodyPose>,
    /// Surface-integral estimate in the height-field frame.
    cbvi: Option<BodyPose>,
    gait_error: Option<String>,
}

#[derive(Serialize)]
struct Case {
    label: String,
    branch: Branch,
    bound: Option<f64>,
    converged: bool,
    error: Option<String>,
    phi1_0: Option<f64>,
    displacement: Option<BodyPose>,
    matched: Option<ContourMatch>,
    no_match: bool,
    /// Distance to the nearest closed contour, matched or not.
    nearest_contour: Option<f64>,
    /// Distance from the gait to the nearest junction.
    nearest_junction: Option<f64>,
    /// Failed branch while the zero set carries junctions.
    junction_flag: bool,
}

#[derive(Serialize)]
struct ComparisonReport {
    schema_version: u32,
    model: ModelInfo,
    pmp_frame: BodyFrameSpec,
    window: Window,
    grid: usize,
    agreement_distance: f64,
    junction_bearing_contours: usize,
    junctions: Vec<Junction>,
    contours: Vec<ContourSummary>,
    cases: Vec<Case>,
}

pub fn run(a: &CompareArgs) -> CliResult<Status> {
    // the height field is read in the chosen frame, the PMP problem in the middle-link frame
    let setup = Setup::new(&a.common, FrameChoice::Optimized)?;
    let pmp_frame = BodyFrameSpec::MiddleLink;
    let model = Framed::new(&setup.swimmer, pmp_frame);
    let opts = options(&a.scan);

    let mut runs: Vec<(String, Branch, Option<f64>, Result<PmpSolution, GaitError>)> = Vec::new();
    let candidates = unbounded_candidates(&model, &opts);
    for (name, branch) in [("forward", Branch::Forward), ("reverse", Branch::Reverse)] {
        let r = match &candidates {
            Ok(c) => select_branch(c.clone(), branch, &opts),
            Err(e) => Err(e.clone()),
        };
        runs.push((name.to_string(), branch, None, r));
    }
    if let Some(b) = a.bound.0 {
        let (r, inactive) = solve(&model, Some(b), Branch::Reverse, &opts);
        let name = if inactive { format!("reverse, b = {b} (inactive)") } else { format!("reverse, b = {b}") };
        runs.push((name, Branch::Reverse, Some(b), r));
    }

    // without an explicit window, widen the default one to hold every gait
    let mut field_args = FieldArgs { window: a.field.window, grid: a.field.grid };
    if field_args.window.is_none() {
        let reach = runs
            .iter()
            .filter_map(|r| r.3.as_ref().ok())
            .flat_map(|s| s.gait_points())
            .fold(0.0f64, |m, p| m.max(p.phi1.abs()).max(p.phi2.abs()));
        let w = default_window(&setup.swimmer);
        if 1.05 * reach > w.phi1.1 {
            field_args.window = Some(Window::square(1.05 * reach));
            field_args.grid = field_args.grid.or(Some(default_grid(&w)));
        }
    }
    let f = compute(&setup, &field_args, Component::X)?;
    let field_model = Framed::new(&setup.swimmer, setup.frame);
    let junction_bearing = f.set.contours.iter().filter(|c| c.kind == ContourKind::JunctionBearing).count();
    let mut plot = field_plot(&f);
    let mut cases = Vec::new();
    for (name, branch, bound, r) in runs {
        let mut case = Case {
            label: name,
            branch,
            bound,
            converged: false,
            error: None,
            phi1_0: None,
            displacement: None,
            matched: None,
            no_match: false,
            nearest_contour: None,
            nearest_junction: None,
            junction_flag: false,
        };
        match r {
            Ok(sol) => {
                let pts = sol.gait_points();
                case.converged = true;
                case.phi1_0 = Some(sol.phi1_0);
                case.displacement = Some(sol.displacement);
                let (matched, nearest) = match_contour(&model, &field_model, &f.set, &pts);
                case.matched = matched;
                case.no_match = case.matched.is_none();
                case.nearest_contour = nearest;
                case.nearest_junction = f
                    .set
                    .junctions
                    .iter()
                    .map(|j| distance_to_point(&pts, j.point))
                    .min_by(f64::total_cmp);
                draw_solution(&mut plot, &sol, color(sol.branch), &label(&sol));
            }
            Err(e) if is_nonconvergence(&e) => {
                case.error = Some(e.to_string());
                case.junction_flag = junction_bearing > 0;
            }
            Err(e) => return Err(CliError::from(e)),
        }
        cases.push(case);
    }

    let title = format!("PMP gaits over the height function ({})", setup.swimmer.name());
    write_text(&setup.path("compare.svg"), &plot.render(&title, "phi1 (rad)", "phi2 (rad)"))?;
    let report = ComparisonReport {
        schema_version: SCHEMA_VERSION,
        model: setup.info(),
        pmp_frame,
        window: f.field.window,
        grid: f.field.n,
        agreement_distance: AGREEMENT_DISTANCE,
        junction_bearing_contours: junction_bearing,
        junctions: f.set.junctions.clone(),
        contours: summarize(&f.set),
        cases,
    };
    write_json(&setup.path("compare.json"), &report)?;
    Ok(Status::Success)
}

fn distance_to_point(pts: &[ShapePoint], p: ShapePoint) -> f64 {
    pts.iter().map(|q| q.dist(p)).fold(f64::INFINITY, f64::min)
}

/// Nearest closed contour within [`MATCH_DISTANCE`] and its displacement as a
/// gait traversed like the PMP gait, plus the distance to the nearest closed
/// contour overall.
fn match_contour<M: ConnectionModel, F: ConnectionModel>(
    model: &M,
    field_model: &F,
    set: &ContourSet,
    pts: &[ShapePoint],
) -> (Option<ContourMatch>, Option<f64>) {
    let Some((index, d)) = set
        .contours
        .iter()
        .enumerate()
        .filter(|(_, c)| c.closed)
        .map(|(k, c)| (k, hausdorff(pts, &c.points)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
    else {
        return (None, None);
    };
    if d > MATCH_DISTANCE {
        return (None, Some(d));
    }
    let mut contour = set.contours[index].clone();
    // start where the PMP gait starts so both displacements share a base shape
    let k = (0..contour.points.len()).min_by(|&a, &b| contour.points[a].dist(pts[0]).total_cmp(&contour.points[b].dist(pts[0]))).unwrap();
    contour.points.rotate_left(k);
    let orientation = if polygon_area(pts) >= 0.0 { Orientation::Ccw } else { Orientation::Cw };
    let mut m = ContourMatch {
        contour: index,
        kind: contour.kind,
        hausdorff: d,
        agrees: d < AGREEMENT_DISTANCE,
        simulated: None,
        cbvi: None,
        gait_error: None,
    };
    let opts = ContourGaitOptions::default();
    let run = contour_as_gait(model, &contour, &set.junctions, orientation, &opts)
        .and_then(|g| Ok((g.simulated, contour_as_gait(field_model, &contour, &set.junctions, orientation, &opts)?.cbvi)));
    match run {
        Ok((sim, cbvi)) => {
            m.simulated = Some(sim);
            m.cbvi = Some(cbvi);
        }
        Err(e) => m.gait_error = Some(e.to_string()),
    }
    (Some(m), Some(d))
}
