//! Gaits and integration of the reconstruction equation along them.

use std::f64::consts::TAU;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{BodyFrameSpec, Framed};
use crate::error::{GaitError, Result};
use crate::models::{ConnectionModel, Swimmer};
use crate::ode::{integrate, OdeOptions, OdeStats};
use crate::se2;
use crate::types::{BodyPose, ShapePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Ccw,
    Cw,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GaitShape {
    /// Starts at `center + (radius, 0)`.
    Circle { center: ShapePoint, radius: f64 },
    /// Axis-aligned; starts at `center + (half_side, 0)`.
    Square { center: ShapePoint, half_side: f64 },
    /// Closed implicitly from the last vertex back to the first.
    Polyline { vertices: Vec<ShapePoint> },
}

/// A closed oriented curve in shape space, parametrized by `s` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gait {
    pub shape: GaitShape,
    #[serde(default)]
    pub orientation: Orientation,
}

/// One smooth piece of a gait.
#[derive(Debug, Clone, Copy)]
enum Piece {
    Arc { center: ShapePoint, radius: f64 },
    Line { a: ShapePoint, b: ShapePoint },
}

impl Piece {
    /// Point and derivative with respect to the local parameter in `[0, 1]`.
    fn eval(&self, u: f64) -> (ShapePoint, ShapePoint) {
        match *self {
            Piece::Arc { center, radius } => {
                let (s, c) = (TAU * u).sin_cos();
                (
                    center + ShapePoint::new(c, s) * radius,
                    ShapePoint::new(-s, c) * (TAU * radius),
                )
            }
            Piece::Line { a, b } => (a + (b - a) * u, b - a),
        }
    }
}

impl Gait {
    pub fn circle(center: ShapePoint, radius: f64) -> Self {
        Gait { shape: GaitShape::Circle { center, radius }, orientation: Orientation::Ccw }
    }

    pub fn square(center: ShapePoint, half_side: f64) -> Self {
        Gait { shape: GaitShape::Square { center, half_side }, orientation: Orientation::Ccw }
    }

    pub fn polyline(vertices: Vec<ShapePoint>) -> Result<Self> {
        let g = Gait { shape: GaitShape::Polyline { vertices }, orientation: Orientation::Ccw };
        g.validate()?;
        Ok(g)
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn reversed(&self) -> Self {
        self.clone().with_orientation(self.orientation.reversed())
    }

    pub fn validate(&self) -> Result<()> {
        match &self.shape {
            GaitShape::Circle { center, radius } => {
                if !center.is_finite() || !radius.is_finite() || *radius < 0.0 {
                    return Err(GaitError::InvalidGait(format!("bad circle radius {radius}")));
                }
            }
            GaitShape::Square { center, half_side } => {
                if !center.is_finite() || !half_side.is_finite() || *half_side < 0.0 {
                    return Err(GaitError::InvalidGait(format!("bad square half side {half_side}")));
                }
            }
            GaitShape::Polyline { vertices } => {
                if vertices.iter().any(|p| !p.is_finite()) {
                    return Err(GaitError::InvalidGait("non-finite vertex".into()));
                }
                let n = vertices.len();
                if n < 3 {
                    return Err(GaitError::InvalidGait(format!("polyline needs at least 3 vertices, got {n}")));
                }
                for i in 0..n {
                    if vertices[i].dist(vertices[(i + 1) % n]) == 0.0 {
                        return Err(GaitError::InvalidGait(format!("zero-length segment at vertex {i}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Vertices of the corner-bearing shapes, in ccw order.
    fn corners(&self) -> Option<Vec<ShapePoint>> {
        match &self.shape {
            GaitShape::Circle { .. } => None,
            GaitShape::Square { center, half_side: e } => {
                let c = *center;
                let e = *e;
                Some(vec![
                    c + ShapePoint::new(e, 0.0),
                    c + ShapePoint::new(e, e),
                    c + ShapePoint::new(-e, e),
                    c + ShapePoint::new(-e, -e),
                    c + ShapePoint::new(e, -e),
                ])
            }
            GaitShape::Polyline { vertices } => Some(vertices.clone()),
        }
    }

    /// Smooth pieces with their global parameter ranges, in ccw orientation.
    fn pieces(&self) -> Vec<(f64, f64, Piece)> {
        match &self.shape {
            GaitShape::Circle { center, radius } => {
                vec![(0.0, 1.0, Piece::Arc { center: *center, radius: *radius })]
            }
            _ => {
                let v = self.corners().unwrap();
                let n = v.len();
                let lens: Vec<f64> = (0..n).map(|i| v[i].dist(v[(i + 1) % n])).collect();
                let total: f64 = lens.iter().sum();
                let mut s0 = 0.0;
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    let s1 = if i + 1 == n { 1.0 } else { s0 + lens[i] / total };
                    out.push((s0, s1, Piece::Line { a: v[i], b: v[(i + 1) % n] }));
                    s0 = s1;
                }
                out
            }
        }
    }

    /// Shape at parameter `s`, honouring the orientation.
    pub fn point(&self, s: f64) -> ShapePoint {
        let s = match self.orientation {
            Orientation::Ccw => s,
            Orientation::Cw => 1.0 - s,
        };
        let s = s.clamp(0.0, 1.0);
        for (s0, s1, piece) in self.pieces() {
            if s <= s1 {
                let u = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
                return piece.eval(u).0;
            }
        }
        unreachable!()
    }

    /// `n` points equally spaced in the gait parameter (the start point once).
    pub fn sample(&self, n: usize) -> Vec<ShapePoint> {
        (0..n).map(|i| self.point(i as f64 / n as f64)).collect()
    }

    /// Polygon bounding the enclosed region, oriented as the gait.
    /// Circles are sampled with `n` points; polylines use their vertices.
    pub fn boundary(&self, n: usize) -> Vec<ShapePoint> {
        let mut pts = match self.corners() {
            Some(v) => v,
            None => Gait { orientation: Orientation::Ccw, ..self.clone() }.sample(n),
        };
        if self.orientation == Orientation::Cw {
            pts.reverse();
        }
        pts
    }
}

/// Monotone map of each smooth piece's parameter onto itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpeedProfile {
    #[default]
    Uniform,
    /// Quadratic ease-in/ease-out: slow near the piece ends, fast in the middle.
    QuadraticEase,
    /// Rate `u^p`, `p > 0`.
    Power(f64),
}

impl SpeedProfile {
    fn map(self, t: f64) -> (f64, f64) {
        match self {
            SpeedProfile::Uniform => (t, 1.0),
            SpeedProfile::QuadraticEase => {
                if t < 0.5 {
                    (2.0 * t * t, 4.0 * t)
                } else {
                    let r = 1.0 - t;
                    (1.0 - 2.0 * r * r, 4.0 * r)
                }
            }
            SpeedProfile::Power(p) => (t.powf(p), if t == 0.0 && p < 1.0 { 0.0 } else { p * t.powf(p - 1.0) }),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub s: Vec<f64>,
    pub shape: Vec<ShapePoint>,
    pub pose: Vec<BodyPose>,
    pub stats: OdeStats,
}

impl Trajectory {
    /// Net displacement over the gait.
    pub fn displacement(&self) -> BodyPose {
        self.pose.last().copied().unwrap_or(BodyPose::IDENTITY)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "s,phi1,phi2,x,y,theta")?;
        for i in 0..self.s.len() {
            let (p, q) = (self.shape[i], self.pose[i]);
            writeln!(w, "{},{},{},{},{},{}", self.s[i], p.phi1, p.phi2, q.x, q.y, q.theta)?;
        }
        Ok(())
    }
}

/// Integrates `dq/ds = R(theta) A(phi(s)) phi'(s)` from the identity pose,
/// in the body frame `frame`.
pub fn integrate_gait(swimmer: &Swimmer, gait: &Gait, frame: &BodyFrameSpec, opts: &OdeOptions) -> Result<Trajectory> {
    integrate_gait_with(&Framed::new(swimmer, *frame), gait, SpeedProfile::Uniform, opts)
}

/// As [`integrate_gait`] for any connection model and speed profile. Pieces
/// meeting at corners are integrated separately, restarting the integrator.
pub fn integrate_gait_with<M: ConnectionModel>(
    model: &M,
    gait: &Gait,
    profile: SpeedProfile,
    opts: &OdeOptions,
) -> Result<Trajectory> {
    gait.validate()?;
    let mut pieces = gait.pieces();
    let cw = gait.orientation == Orientation::Cw;
    if cw {
        pieces.reverse();
    }
    let mut traj = Trajectory { s: vec![0.0], shape: vec![gait.point(0.0)], pose: vec![BodyPose::IDENTITY], stats: OdeStats::default() };
    let mut q = BodyPose::IDENTITY;
    for (s0, s1, piece) in pieces {
        // local parameter t runs forward in time; u is the ccw piece parameter
        let at = |t: f64| {
            let (m, dm) = profile.map(t);
            let (u, du) = if cw { (1.0 - m, -dm) } else { (m, dm) };
            let (p, dp) = piece.eval(u);
            (u, p, dp * du)
        };
        let rhs = |t: f64, y: &[f64; 3]| {
            let (_, p, dp) = at(t);
            let xi = model.connection(p)?.apply(dp);
            Ok(se2::to_world(y[2], xi))
        };
        let sol = integrate(rhs, 0.0, q.as_array(), 1.0, opts)?;
        traj.stats += sol.stats;
        for (t, y) in sol.t.iter().zip(&sol.y).skip(1) {
            let (u, p, _) = at(*t);
            let s = s0 + (s1 - s0) * u;
            traj.s.push(if cw { 1.0 - s } else { s });
            traj.shape.push(p);
            traj.pose.push(BodyPose::new(y[0], y[1], y[2]));
        }
        q = *traj.pose.last().unwrap();
    }
    Ok(traj)
}

/// Largest componentwise difference between the displacements obtained with
/// two speed profiles along the same curve.
pub fn time_reparametrization_check<M: ConnectionModel>(
    model: &M,
    gait: &Gait,
    a: SpeedProfile,
    b: SpeedProfile,
    opts: &OdeOptions,
) -> Result<f64> {
    let qa = integrate_gait_with(model, gait, a, opts)?.displacement();
    let qb = integrate_gait_with(model, gait, b, opts)?.displacement();
    Ok(se2::pose_error(qa, qb))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaitFamily {
    Circle,
    Square,
}

impl GaitFamily {
    pub fn gait(self, eps: f64) -> Gait {
        let o = ShapePoint::new(0.0, 0.0);
        match self {
            GaitFamily::Circle => Gait::circle(o, eps),
            GaitFamily::Square => Gait::square(o, eps),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GaitFamily::Circle => "circle",
            GaitFamily::Square => "square",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
}

/// Extremum of `dx` over a sweep, refined by a parabola through the grid
/// neighbours when it is interior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub eps: f64,
    pub dx: f64,
    pub interior: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub family: GaitFamily,
    pub rows: Vec<SweepRow>,
    pub max: Extremum,
    pub min: Extremum,
}

impl Sweep {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "eps,dx,dy,dtheta")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.eps, r.dx, r.dy, r.dtheta)?;
        }
        Ok(())
    }

    /// Number of strict sign changes of `dx` along the grid.
    pub fn dx_sign_changes(&self) -> usize {
        let signs: Vec<f64> = self.rows.iter().map(|r| r.dx).filter(|v| *v != 0.0).map(f64::signum).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Even grid `start, start + step, ...` up to `stop` inclusive (within rounding).
pub fn eps_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(start > 0.0) || !(stop >= start) || !stop.is_finite() {
        return Err(GaitError::InvalidParams(format!("bad amplitude grid {start}..{stop} step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

pub fn displacement_sweep(
    swimmer: &Swimmer,
    family: GaitFamily,
    eps: &[f64],
    frame: &BodyFrameSpec,
    opts: &OdeOptions,
) -> Result<Sweep> {
    if eps.is_empty() {
        return Err(GaitError::InvalidParams("empty amplitude grid".into()));
    }
    if eps.windows(2).any(|w| !(w[1] > w[0])) || !(eps[0] > 0.0) {
        return Err(GaitError::InvalidParams("amplitude grid must be positive and strictly increasing".into()));
    }
    let rows = eps
        .par_iter()
        .map(|&e| {
            let q = integrate_gait(swimmer, &family.gait(e), frame, opts)?.displacement();
            Ok(SweepRow { eps: e, dx: q.x, dy: q.y, dtheta: q.theta })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = extremum(&rows, 1.0);
    let min = extremum(&rows, -1.0);
    Ok(Sweep { family, rows, max, min })
}

fn extremum(rows: &[SweepRow], sign: f64) -> Extremum {
    let i = (0..rows.len())
        .max_by(|&a, &b| (sign * rows[a].dx).total_cmp(&(sign * rows[b].dx)))
        .unwrap();
    if i == 0 || i + 1 == rows.len() {
        return Extremum { eps: rows[i].eps, dx: rows[i].dx, interior: false };
    }
    let (x0, x1, x2) = (rows[i - 1].eps, rows[i].eps, rows[i + 1].eps);
    let (y0, y1, y2) = (rows[i - 1].dx, rows[i].dx, rows[i + 1].dx);
    // Newton form of the interpolating parabola
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c2 = (d12 - d01) / (x2 - x0);
    if c2 == 0.0 {
        return Extremum { eps: x1, dx: y1, interior: true };
    }
    let c1 = d01 - c2 * (x0 + x1);
    let xv = (-c1 / (2.0 * c2)).clamp(x0, x2);
    let yv = y0 + d01 * (xv - x0) + c2 * (xv - x0) * (xv - x1);
    Extremum { eps: xv, dx: yv, interior: true }
}
