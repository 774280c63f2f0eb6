use gaitforge_core::config::FrameChoice;
use gaitforge_core::connection::{curvature, Framed, Window};
use gaitforge_core::geometry::{
    extract_zero_contours, sample_height_field, Component, ContourKind, ContourSet, HeightField, Junction,
};
use gaitforge_core::models::Swimmer;
use gaitforge_core::{GaitError, ShapePoint};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{FieldArgs, HeightfieldArgs};
use crate::io::{read_shape_csv, write_json, write_text, write_with, xy};
use crate::svg::{Plot, GREEN, ORANGE, PURPLE, RED};
use crate::{CliResult, ModelInfo, Setup, Status, SCHEMA_VERSION};

const OVERLAY_COLORS: [&str; 4] = [PURPLE, RED, GREEN, ORANGE];

/// Window used when none is given: the perfect fluid's structure sits further out.
pub fn default_window(swimmer: &Swimmer) -> Window {
    match swimmer {
        Swimmer::Purcell(_) => Window::square(3.2),
        Swimmer::PerfectFluid(_) => Window::square(6.0),
    }
}

pub fn default_grid(w: &Window) -> usize {
    let half = [w.phi1.0, w.phi1.1, w.phi2.0, w.phi2.1].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if half <= 3.2 + 1e-12 {
        401
    } else {
        601
    }
}

pub struct Field {
    pub field: HeightField,
    /// Empty when the field does not change sign.
    pub set: ContourSet,
}

pub fn compute(setup: &Setup, args: &FieldArgs, component: Component) -> CliResult<Field> {
    let window = args.window.unwrap_or_else(|| default_window(&setup.swimmer));
    let grid = args.grid.unwrap_or_else(|| default_grid(&window));
    let field = sample_height_field(&setup.swimmer, &setup.frame, window, grid, component)?;
    let set = match extract_zero_contours(&field) {
        Ok(s) => s,
        Err(GaitError::EmptyContour) => ContourSet { contours: Vec::new(), junctions: Vec::new() },
        Err(e) => return Err(e.into()),
    };
    Ok(Field { field, set })
}

#[derive(Serialize)]
pub struct ContourSummary {
    pub index: usize,
    pub kind: ContourKind,
    pub closed: bool,
    pub vertices: usize,
    pub area: f64,
    pub encloses_origin: bool,
}

pub fn summarize(set: &ContourSet) -> Vec<ContourSummary> {
    set.contours
        .iter()
        .enumerate()
        .map(|(index, c)| ContourSummary {
            index,
            kind: c.kind,
            closed: c.closed,
            vertices: c.points.len(),
            area: c.area(),
            encloses_origin: c.encloses(ShapePoint::new(0.0, 0.0)),
        })
        .collect()
}

#[derive(Serialize)]
struct HeightfieldReport {
    schema_version: u32,
    model: ModelInfo,
    window: Window,
    grid: usize,
    component: Component,
    range: (f64, f64),
    empty_contour: bool,
    contours: Vec<ContourSummary>,
    junctions: Vec<Junction>,
}

/// Raster, dashed zero contours and junction rings.
pub fn field_plot(f: &Field) -> Plot {
    let w = f.field.window;
    let mut p = Plot::shape_space(w.phi1, w.phi2);
    p.raster(&f.field);
    for c in &f.set.contours {
        p.line(&xy(&c.points), "black", 1.2, true, c.closed);
    }
    for j in &f.set.junctions {
        p.ring((j.point.phi1, j.point.phi2), 7.0);
    }
    p.legend("zero level", "black", true);
    p
}

pub fn component_name(c: Component) -> &'static str {
    match c {
        Component::X => "x",
        Component::Y => "y",
        Component::Theta => "theta",
    }
}

pub fn run(a: &HeightfieldArgs) -> CliResult<Status> {
    let setup = Setup::new(&a.common, FrameChoice::Optimized)?;
    let overlays = a.overlay.iter().map(|p| read_shape_csv(p)).collect::<CliResult<Vec<_>>>()?;
    let f = compute(&setup, &a.field, a.component)?;
    write_with(&setup.path("heightfield.csv"), |w| f.field.write_csv(w))?;
    write_with(&setup.path("contours.csv"), |w| f.set.write_csv(w))?;
    if a.curvature {
        write_curvature(&setup, &f.field)?;
    }
    let mut p = field_plot(&f);
    for (k, (pts, path)) in overlays.iter().zip(&a.overlay).enumerate() {
        let color = OVERLAY_COLORS[k % OVERLAY_COLORS.len()];
        p.line(&xy(pts), color, 2.2, false, true);
        // `run1/gait.csv` reads better than a bare `gait`
        let name: Vec<String> = path.iter().rev().take(2).map(|c| c.to_string_lossy().into_owned()).collect();
        let name = name.into_iter().rev().collect::<Vec<_>>().join("/");
        p.legend(&name, color, false);
    }
    let title = format!("Height function, {} component ({})", component_name(a.component), setup.swimmer.name());
    write_text(&setup.path("heightfield.svg"), &p.render(&title, "phi1 (rad)", "phi2 (rad)"))?;
    let report = HeightfieldReport {
        schema_version: SCHEMA_VERSION,
        model: setup.info(),
        window: f.field.window,
        grid: f.field.n,
        component: a.component,
        range: f.field.range(),
        empty_contour: f.set.contours.is_empty(),
        contours: summarize(&f.set),
        junctions: f.set.junctions.clone(),
    };
    write_json(&setup.path("heightfield.json"), &report)?;
    Ok(Status::Success)
}

fn write_curvature(setup: &Setup, field: &HeightField) -> CliResult<()> {
    let model = Framed::new(&setup.swimmer, setup.frame);
    let samples = field
        .window
        .grid(field.n)
        .par_iter()
        .map(|&p| curvature(&model, p))
        .collect::<Result<Vec<_>, _>>()?;
    write_with(&setup.path("curvature.csv"), |w| {
        use std::io::Write;
        writeln!(w, "phi1,phi2,dAx,dAy,dAth,brx,bry,DAx,DAy,DAth")?;
        for s in &samples {
            let (d, b, t) = (s.d_a, s.bracket, s.total);
            writeln!(w, "{},{},{},{},{},{},{},{},{},{}", s.phi.phi1, s.phi.phi2, d[0], d[1], d[2], b[0], b[1], t[0], t[1], t[2])?;
        }
        Ok(())
    })
}
