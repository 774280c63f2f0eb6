use serde::{Deserialize, Serialize};

use super::contour::{Contour, ContourKind};
use super::field::{height_at, Component};
use super::junction::Junction;
use crate::connection::{cbvi, polygon_area, CBVI_TOLERANCE};
use crate::error::{GaitError, Result};
use crate::models::ConnectionModel;
use crate::ode::OdeOptions;
use crate::simulate::{integrate_gait_with, Gait, Orientation, SpeedProfile};
use crate::types::{BodyPose, ShapePoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourGaitOptions {
    /// Loops are resampled to this many vertices before integration.
    pub max_vertices: usize,
    pub ode: OdeOptions,
    pub cbvi_tol: f64,
}

impl Default for ContourGaitOptions {
    fn default() -> Self {
        ContourGaitOptions { max_vertices: 256, ode: OdeOptions::default(), cbvi_tol: CBVI_TOLERANCE }
    }
}

/// A zero-level loop run as a gait.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourGait {
    pub gait: Gait,
    /// Exact displacement from integrating the reconstruction equation.
    pub simulated: BodyPose,
    /// Surface-integral estimate.
    pub cbvi: BodyPose,
    /// `|cbvi.x - simulated.x| / |simulated.x|`.
    pub relative_gap: f64,
}

/// Wraps a closed junction-free loop as a gait traversed in `orientation`
/// and reports the simulated and surface-integral displacements.
pub fn contour_as_gait<M: ConnectionModel>(
    model: &M,
    contour: &Contour,
    junctions: &[Junction],
    orientation: Orientation,
    opts: &ContourGaitOptions,
) -> Result<ContourGait> {
    if contour.kind == ContourKind::JunctionBearing {
        let p = junctions
            .iter()
            .map(|j| j.point)
            .min_by(|a, b| nearest(contour, *a).total_cmp(&nearest(contour, *b)))
            .unwrap_or(contour.points[0]);
        return Err(GaitError::JunctionBearing(p.phi1, p.phi2));
    }
    if !contour.closed {
        return Err(GaitError::InvalidGait("open contour clipped by the window".into()));
    }
    let mut pts = contour.resampled(opts.max_vertices);
    if polygon_area(&pts) < 0.0 {
        pts.reverse();
    }
    let gait = Gait::polyline(pts)?.with_orientation(orientation);
    let simulated = integrate_gait_with(model, &gait, SpeedProfile::Uniform, &opts.ode)?.displacement();
    let cbvi = cbvi(model, &gait.boundary(0), opts.cbvi_tol)?.displacement();
    let relative_gap = (cbvi.x - simulated.x).abs() / simulated.x.abs();
    Ok(ContourGait { gait, simulated, cbvi, relative_gap })
}

fn nearest(contour: &Contour, p: ShapePoint) -> f64 {
    contour.points.iter().map(|q| q.dist(p)).fold(f64::INFINITY, f64::min)
}

fn segment_distance(p: ShapePoint, a: ShapePoint, b: ShapePoint) -> f64 {
    let d = b - a;
    let l2 = d.phi1 * d.phi1 + d.phi2 * d.phi2;
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.phi1 - a.phi1) * d.phi1 + (p.phi2 - a.phi2) * d.phi2) / l2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

fn directed(a: &[ShapePoint], b: &[ShapePoint]) -> f64 {
    let m = b.len();
    a.iter()
        .map(|&p| {
            if m == 1 {
                return p.dist(b[0]);
            }
            (0..m).map(|k| segment_distance(p, b[k], b[(k + 1) % m])).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two closed polylines, measured from
/// the vertices of each to the edges of the other.
pub fn hausdorff(a: &[ShapePoint], b: &[ShapePoint]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    directed(a, b).max(directed(b, a))
}

/// One Newton pass moving every vertex along the gradient onto `H = 0`.
pub fn refine_contour<M: ConnectionModel>(model: &M, component: Component, contour: &mut Contour, step: f64) -> Result<()> {
    for p in &mut contour.points {
        let h = |q: ShapePoint| height_at(model, component, q);
        let v = h(*p)?;
        let g1 = (h(*p + ShapePoint::new(step, 0.0))? - h(*p - ShapePoint::new(step, 0.0))?) / (2.0 * step);
        let g2 = (h(*p + ShapePoint::new(0.0, step))? - h(*p - ShapePoint::new(0.0, step))?) / (2.0 * step);
        let g2n = g1 * g1 + g2 * g2;
        if g2n > 0.0 {
            *p = *p - ShapePoint::new(g1, g2) * (v / g2n);
        }
    }
    Ok(())
}
