use gaitforge_core::config::FrameChoice;
use gaitforge_core::ode::OdeOptions;
use gaitforge_core::simulate::{displacement_sweep, eps_grid, Extremum, GaitFamily, Sweep};
use serde::Serialize;

use crate::args::{FamilyArg, SweepArgs};
use crate::io::{write_json, write_text, write_with};
use crate::svg::{Plot, BLUE, GREY, RED};
use crate::{CliResult, ModelInfo, Setup, Status, SCHEMA_VERSION};

#[derive(Serialize)]
struct FamilySummary {
    family: GaitFamily,
    points: usize,
    max: Extremum,
    min: Extremum,
    sign_changes: usize,
}

#[derive(Serialize)]
struct SweepReport {
    schema_version: u32,
    model: ModelInfo,
    eps_min: f64,
    eps_max: f64,
    eps_step: f64,
    families: Vec<FamilySummary>,
}

pub fn run(a: &SweepArgs) -> CliResult<Status> {
    let setup = Setup::new(&a.common, FrameChoice::MiddleLink)?;
    let eps = eps_grid(a.eps_min, a.eps_max, a.eps_step)?;
    let families = match a.family {
        FamilyArg::Circle => vec![GaitFamily::Circle],
        FamilyArg::Square => vec![GaitFamily::Square],
        FamilyArg::Both => vec![GaitFamily::Circle, GaitFamily::Square],
    };
    let opts = OdeOptions::default();
    let mut sweeps = Vec::new();
    for family in families {
        let sweep = displacement_sweep(&setup.swimmer, family, &eps, &setup.frame, &opts)?;
        write_with(&setup.path(&format!("sweep_{}.csv", family.name())), |w| sweep.write_csv(w))?;
        sweeps.push(sweep);
    }
    write_text(&setup.path("fig2.svg"), &plot(&sweeps))?;
    let report = SweepReport {
        schema_version: SCHEMA_VERSION,
        model: setup.info(),
        eps_min: a.eps_min,
        eps_max: a.eps_max,
        eps_step: a.eps_step,
        families: sweeps
            .iter()
            .map(|s| FamilySummary {
                family: s.family,
                points: s.rows.len(),
                max: s.max,
                min: s.min,
                sign_changes: s.dx_sign_changes(),
            })
            .collect(),
    };
    write_json(&setup.path("sweep.json"), &report)?;
    Ok(Status::Success)
}

fn plot(sweeps: &[Sweep]) -> String {
    let all = sweeps.iter().flat_map(|s| &s.rows);
    let (mut x, mut y) = ((f64::INFINITY, f64::NEG_INFINITY), (0.0f64, 0.0f64));
    for r in all {
        x = (x.0.min(r.eps), x.1.max(r.eps));
        y = (y.0.min(r.dx), y.1.max(r.dx));
    }
    let pad = 0.08 * (y.1 - y.0);
    let mut p = Plot::new((0.0, x.1), (y.0 - pad, y.1 + pad));
    p.hline(0.0, GREY);
    for s in sweeps {
        let color = match s.family {
            GaitFamily::Circle => BLUE,
            GaitFamily::Square => RED,
        };
        let pts: Vec<(f64, f64)> = s.rows.iter().map(|r| (r.eps, r.dx)).collect();
        p.line(&pts, color, 2.0, false, false);
        for e in [s.max, s.min] {
            p.marker((e.eps, e.dx), color, Some(&format!("{:.3}", e.eps)));
        }
        p.legend(s.family.name(), color, false);
    }
    p.render("Net x displacement per cycle", "amplitude eps (rad)", "dx")
}
