//! Body frames, curvature of the local connection and the corrected body
//! velocity integral over shape-space regions.

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GaitError, Result};
use crate::models::{link_placements, ConnectionModel, Swimmer};
use crate::scalar::Scalar;
use crate::se2;
use crate::types::{BodyPose, BodyVelocity, LocalConnection, ShapePoint};

/// Where the body frame sits relative to the links.
///
/// A weighted frame is placed at `sum_i w_i r_i` with heading `sum_i v_i beta_i`,
/// where `r_i`, `beta_i` are the link centres and headings in the middle-link frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BodyFrameSpec {
    #[default]
    MiddleLink,
    Weighted {
        position: [f64; 3],
        orientation: [f64; 3],
    },
}

impl BodyFrameSpec {
    pub fn weighted(position: [f64; 3], orientation: [f64; 3]) -> Result<Self> {
        let spec = BodyFrameSpec::Weighted { position, orientation };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (w, v) = self.weights();
        for set in [w, v] {
            if set.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(GaitError::InvalidParams(format!("frame weights must be nonnegative: {set:?}")));
            }
            if (set.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(GaitError::InvalidParams(format!("frame weights must sum to 1: {set:?}")));
            }
        }
        Ok(())
    }

    /// `(position, orientation)` weights; the middle-link frame is `e_0` for both.
    pub fn weights(&self) -> ([f64; 3], [f64; 3]) {
        match *self {
            BodyFrameSpec::MiddleLink => ([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]),
            BodyFrameSpec::Weighted { position, orientation } => (position, orientation),
        }
    }
}

/// Pose of a weighted frame in the middle-link frame and its shape derivative.
pub fn frame_offset<T: Scalar>(
    lengths: [f64; 3],
    frame: &BodyFrameSpec,
    phi1: T,
    phi2: T,
) -> ([T; 3], [[T; 2]; 3]) {
    let (w, v) = frame.weights();
    let p = link_placements(lengths, phi1, phi2);
    let mut h = [T::zero(); 3];
    let mut dh = [[T::zero(); 2]; 3];
    for i in 0..3 {
        h[0] += p[i].x * w[i];
        h[1] += p[i].y * w[i];
        h[2] += p[i].heading * v[i];
        for j in 0..2 {
            dh[0][j] += p[i].dshape[0][j] * w[i];
            dh[1][j] += p[i].dshape[1][j] * w[i];
            dh[2][j] += p[i].dshape[2][j] * v[i];
        }
    }
    (h, dh)
}

/// A connection model re-expressed in another body frame:
/// `A' = Ad_{h^-1} A + h^-1 dh/dphi`.
#[derive(Debug, Clone, Copy)]
pub struct Framed<M> {
    pub model: M,
    pub lengths: [f64; 3],
    pub frame: BodyFrameSpec,
}

impl<'a> Framed<&'a Swimmer> {
    pub fn new(swimmer: &'a Swimmer, frame: BodyFrameSpec) -> Self {
        Framed { model: swimmer, lengths: swimmer.link_lengths(), frame }
    }
}

impl<M: ConnectionModel> ConnectionModel for Framed<M> {
    fn connection_at<T: Scalar>(&self, phi1: T, phi2: T) -> Result<[[T; 2]; 3]> {
        let a = self.model.connection_at(phi1, phi2)?;
        if self.frame == BodyFrameSpec::MiddleLink {
            return Ok(a);
        }
        let (h, dh) = frame_offset(self.lengths, &self.frame, phi1, phi2);
        let (s, c) = h[2].sin_cos();
        // h^-1 = (-R^T t, -alpha)
        let tx = -(c * h[0] + s * h[1]);
        let ty = s * h[0] - c * h[1];
        let mut out = [[T::zero(); 2]; 3];
        for j in 0..2 {
            let (vx, vy, w) = (a[0][j] + dh[0][j], a[1][j] + dh[1][j], a[2][j]);
            out[0][j] = c * vx + s * vy + w * ty;
            out[1][j] = -(s * vx) + c * vy - w * tx;
            out[2][j] = w + dh[2][j];
        }
        Ok(out)
    }
}

/// Curvature of the connection at one shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub phi: ShapePoint,
    /// Row-wise curl of the connection.
    pub d_a: [f64; 3],
    /// Local Lie bracket of the two connection columns.
    pub bracket: [f64; 3],
    /// Total curvature `d_a + bracket`.
    pub total: [f64; 3],
}

/// Default finite-difference step for the exterior derivative.
pub fn default_step(phi: ShapePoint) -> f64 {
    1e-5 * phi.norm().max(1.0)
}

/// Row-wise curl `dA_col2/dphi1 - dA_col1/dphi2` by central differences.
pub fn exterior_derivative<M: ConnectionModel>(model: &M, phi: ShapePoint, h: Option<f64>) -> Result<[f64; 3]> {
    let h = h.unwrap_or_else(|| default_step(phi));
    if !(h > 0.0) {
        return Err(GaitError::InvalidParams(format!("step must be positive, got {h}")));
    }
    let a = |d1: f64, d2: f64| model.connection(ShapePoint::new(phi.phi1 + d1, phi.phi2 + d2));
    let (p1, m1, p2, m2) = (a(h, 0.0)?, a(-h, 0.0)?, a(0.0, h)?, a(0.0, -h)?);
    Ok(std::array::from_fn(|r| {
        (p1.0[r][1] - m1.0[r][1]) / (2.0 * h) - (p2.0[r][0] - m2.0[r][0]) / (2.0 * h)
    }))
}

/// Exterior derivative with one Richardson extrapolation step.
pub fn exterior_derivative_richardson<M: ConnectionModel>(
    model: &M,
    phi: ShapePoint,
    h: Option<f64>,
) -> Result<[f64; 3]> {
    let h = h.unwrap_or_else(|| 4.0 * default_step(phi));
    let coarse = exterior_derivative(model, phi, Some(h))?;
    let fine = exterior_derivative(model, phi, Some(0.5 * h))?;
    Ok(std::array::from_fn(|r| (4.0 * fine[r] - coarse[r]) / 3.0))
}

pub fn lie_bracket(a: &LocalConnection) -> [f64; 3] {
    se2::bracket(a.column(0), a.column(1)).as_array()
}

/// Total curvature `DA = dA + [A1, A2]`.
///
/// With body velocity `A(phi) dphi`, a small loop of signed area `s` around
/// `phi` displaces the body by `s DA(phi)` to leading order.
pub fn curvature<M: ConnectionModel>(model: &M, phi: ShapePoint) -> Result<CurvatureSample> {
    let d_a = exterior_derivative(model, phi, None)?;
    let bracket = lie_bracket(&model.connection(phi)?);
    Ok(CurvatureSample { phi, d_a, bracket, total: std::array::from_fn(|r| d_a[r] + bracket[r]) })
}

/// Total curvature via forward-mode derivatives rather than differences.
pub fn curvature_exact<M: ConnectionModel>(model: &M, phi: ShapePoint) -> Result<[f64; 3]> {
    use num_dual::Dual64;
    let d1 = model.connection_at(Dual64::from(phi.phi1).derivative(), Dual64::from(phi.phi2))?;
    let d2 = model.connection_at(Dual64::from(phi.phi1), Dual64::from(phi.phi2).derivative())?;
    let a = LocalConnection(std::array::from_fn(|r| [d1[r][0].re, d1[r][1].re]));
    let br = lie_bracket(&a);
    Ok(std::array::from_fn(|r| d1[r][1].eps - d2[r][0].eps + br[r]))
}

/// Result of a corrected body velocity integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cbvi {
    /// Signed surface integral of the total curvature (positive for ccw regions).
    pub integral: [f64; 3],
    pub evaluations: usize,
}

impl Cbvi {
    /// Displacement estimate: the group exponential of the integral.
    pub fn displacement(&self) -> BodyPose {
        let [vx, vy, w] = self.integral;
        se2::exp(BodyVelocity::new(vx, vy, w))
    }
}

pub const CBVI_TOLERANCE: f64 = 1e-7;

/// Integrates the total curvature over the region bounded by `boundary`
/// (closed implicitly), signed by the boundary orientation.
pub fn cbvi<M: ConnectionModel>(model: &M, boundary: &[ShapePoint], tol: f64) -> Result<Cbvi> {
    let pts = dedup_closed(boundary);
    if pts.len() < 3 {
        return Ok(Cbvi { integral: [0.0; 3], evaluations: 0 });
    }
    if polygon_self_intersects(&pts) {
        return Err(GaitError::NonSimpleRegion);
    }
    let area: f64 = polygon_area(&pts).abs();
    if area < 1e-300 {
        return Ok(Cbvi { integral: [0.0; 3], evaluations: 0 });
    }
    let c = centroid(&pts);
    // Fan triangulation with signed triangles: each point is weighted by its
    // winding number, which is +-1 inside a simple polygon and 0 outside.
    let n = pts.len();
    let fan: Vec<_> = (0..n).map(|i| [c, pts[i], pts[(i + 1) % n]]).collect();
    let total_abs: f64 = fan.iter().map(|t| tri_area(t).abs()).sum();
    let parts: Vec<Result<([f64; 3], usize)>> = fan
        .par_iter()
        .map(|t| {
            let share = tol * tri_area(t).abs() / total_abs;
            let f = |p: ShapePoint| curvature(model, p).map(|s| s.total);
            adaptive_triangle(&f, *t, share, 0)
        })
        .collect();
    let mut integral = [0.0; 3];
    let mut evaluations = 0;
    for part in parts {
        let (v, e) = part?;
        for r in 0..3 {
            integral[r] += v[r];
        }
        evaluations += e;
    }
    Ok(Cbvi { integral, evaluations })
}

fn dedup_closed(boundary: &[ShapePoint]) -> Vec<ShapePoint> {
    let mut pts: Vec<ShapePoint> = Vec::with_capacity(boundary.len());
    for &p in boundary {
        if pts.last().is_none_or(|q: &ShapePoint| q.dist(p) > 1e-14) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && pts[0].dist(*pts.last().unwrap()) <= 1e-14 {
        pts.pop();
    }
    pts
}

fn tri_area(t: &[ShapePoint; 3]) -> f64 {
    let u = t[1] - t[0];
    let v = t[2] - t[0];
    0.5 * (u.phi1 * v.phi2 - u.phi2 * v.phi1)
}

/// Signed shoelace area (positive for ccw).
pub fn polygon_area(pts: &[ShapePoint]) -> f64 {
    let n = pts.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a.phi1 * b.phi2 - b.phi1 * a.phi2
        })
        .sum::<f64>()
}

fn centroid(pts: &[ShapePoint]) -> ShapePoint {
    let n = pts.len() as f64;
    let s = pts.iter().fold(ShapePoint::new(0.0, 0.0), |acc, &p| acc + p);
    s * (1.0 / n)
}

fn segments_cross(a: ShapePoint, b: ShapePoint, c: ShapePoint, d: ShapePoint) -> bool {
    let orient = |p: ShapePoint, q: ShapePoint, r: ShapePoint| {
        (q.phi1 - p.phi1) * (r.phi2 - p.phi2) - (q.phi2 - p.phi2) * (r.phi1 - p.phi1)
    };
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: ShapePoint, q: ShapePoint, r: ShapePoint, o: f64| {
        o == 0.0
            && r.phi1 >= p.phi1.min(q.phi1)
            && r.phi1 <= p.phi1.max(q.phi1)
            && r.phi2 >= p.phi2.min(q.phi2)
            && r.phi2 <= p.phi2.max(q.phi2)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

/// True if any two non-adjacent edges of the closed polygon meet.
pub fn polygon_self_intersects(pts: &[ShapePoint]) -> bool {
    let n = pts.len();
    if n < 4 {
        return false;
    }
    let bbox = |i: usize| {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        (a.phi1.min(b.phi1), a.phi1.max(b.phi1), a.phi2.min(b.phi2), a.phi2.max(b.phi2))
    };
    let boxes: Vec<_> = (0..n).map(bbox).collect();
    (0..n).into_par_iter().any(|i| {
        let bi = boxes[i];
        (i + 2..n).any(|j| {
            if i == 0 && j == n - 1 {
                return false;
            }
            let bj = boxes[j];
            if bi.1 < bj.0 || bj.1 < bi.0 || bi.3 < bj.2 || bj.3 < bi.2 {
                return false;
            }
            segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])
        })
    })
}

// Degree-5 seven-point rule (barycentric weights).
const R7: [([f64; 3], f64); 7] = {
    const A1: f64 = 0.059_715_871_789_769_82;
    const B1: f64 = 0.470_142_064_105_115_1;
    const A2: f64 = 0.797_426_985_353_087_3;
    const B2: f64 = 0.101_286_507_323_456_3;
    const W1: f64 = 0.132_394_152_788_506_2;
    const W2: f64 = 0.125_939_180_544_827_1;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
        ([A1, B1, B1], W1),
        ([B1, A1, B1], W1),
        ([B1, B1, A1], W1),
        ([A2, B2, B2], W2),
        ([B2, A2, B2], W2),
        ([B2, B2, A2], W2),
    ]
};

fn rule7<F>(f: &F, t: [ShapePoint; 3]) -> Result<[f64; 3]>
where
    F: Fn(ShapePoint) -> Result<[f64; 3]>,
{
    let area = tri_area(&t);
    let mut acc = [0.0; 3];
    for (bary, w) in R7 {
        let p = t[0] * bary[0] + t[1] * bary[1] + t[2] * bary[2];
        let v = f(p)?;
        for r in 0..3 {
            acc[r] += w * v[r];
        }
    }
    Ok(acc.map(|x| x * area))
}

fn adaptive_triangle<F>(f: &F, t: [ShapePoint; 3], tol: f64, depth: u32) -> Result<([f64; 3], usize)>
where
    F: Fn(ShapePoint) -> Result<[f64; 3]>,
{
    let coarse = rule7(f, t)?;
    let m01 = (t[0] + t[1]) * 0.5;
    let m12 = (t[1] + t[2]) * 0.5;
    let m20 = (t[2] + t[0]) * 0.5;
    let kids = [[t[0], m01, m20], [m01, t[1], m12], [m20, m12, t[2]], [m01, m12, m20]];
    let mut fine = [0.0; 3];
    for k in kids {
        let v = rule7(f, k)?;
        for r in 0..3 {
            fine[r] += v[r];
        }
    }
    let err = (0..3).map(|r| (fine[r] - coarse[r]).abs()).fold(0.0, f64::max);
    if err <= tol || depth >= 10 {
        return Ok((fine, 35));
    }
    let mut acc = [0.0; 3];
    let mut evals = 35;
    for k in kids {
        let (v, e) = adaptive_triangle(f, k, 0.25 * tol, depth + 1)?;
        for r in 0..3 {
            acc[r] += v[r];
        }
        evals += e;
    }
    Ok((acc, evals))
}

/// Rectangular region of shape space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub phi1: (f64, f64),
    pub phi2: (f64, f64),
}

impl Window {
    pub fn square(half: f64) -> Self {
        Window { phi1: (-half, half), phi2: (-half, half) }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a < b;
        if ok(self.phi1) && ok(self.phi2) {
            Ok(())
        } else {
            Err(GaitError::InvalidParams(format!("invalid window {self:?}")))
        }
    }

    /// `n x n` grid points, row-major in `phi2`.
    pub fn grid(&self, n: usize) -> Vec<ShapePoint> {
        let ax = |(a, b): (f64, f64), i: usize| a + (b - a) * i as f64 / (n - 1) as f64;
        (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .map(|(i, j)| ShapePoint::new(ax(self.phi1, i), ax(self.phi2, j)))
            .collect()
    }
}

/// Outcome of a frame optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameOptimization {
    pub frame: BodyFrameSpec,
    pub objective: f64,
    pub initial_objective: f64,
    /// Set when no improvement over the initial frame was found.
    pub already_optimal: bool,
}

/// Mean squared Frobenius norm of the framed connection over a grid.
pub fn frame_objective(swimmer: &Swimmer, frame: &BodyFrameSpec, grid: &[ShapePoint]) -> Result<f64> {
    let framed = Framed::new(swimmer, *frame);
    let sum = grid
        .par_iter()
        .map(|&p| framed.connection(p).map(|a| a.frobenius_sq()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum::<f64>();
    Ok(sum / grid.len() as f64)
}

struct FrameCost<'a> {
    swimmer: &'a Swimmer,
    grid: Vec<ShapePoint>,
}

fn weights_from_params(x: &[f64]) -> BodyFrameSpec {
    let norm = |s: &[f64]| {
        let a: [f64; 3] = std::array::from_fn(|i| s[i].abs());
        let t: f64 = a.iter().sum();
        if t > 0.0 {
            a.map(|v| v / t)
        } else {
            [1.0 / 3.0; 3]
        }
    };
    BodyFrameSpec::Weighted { position: norm(&x[..3]), orientation: norm(&x[3..]) }
}

impl CostFunction for FrameCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        frame_objective(self.swimmer, &weights_from_params(x), &self.grid).map_err(argmin::core::Error::new)
    }
}

/// Minimizes the mean squared norm of the connection over `window` with
/// respect to constant convex link weights, by Nelder–Mead from `init`.
pub fn optimize_frame(
    swimmer: &Swimmer,
    window: Window,
    n: usize,
    init: BodyFrameSpec,
) -> Result<FrameOptimization> {
    window.validate()?;
    init.validate()?;
    if n < 2 {
        return Err(GaitError::InvalidParams("frame grid needs at least 2 points per axis".into()));
    }
    let grid = window.grid(n);
    let initial_objective = frame_objective(swimmer, &init, &grid)?;
    let (w, v) = init.weights();
    let x0: Vec<f64> = w.iter().chain(v.iter()).copied().collect();
    let simplex: Vec<Vec<f64>> = std::iter::once(x0.clone())
        .chain((0..6).map(|i| {
            let mut x = x0.clone();
            x[i] += 0.3;
            x
        }))
        .collect();
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-15)
        .map_err(|e| GaitError::InvalidParams(e.to_string()))?;
    let res = Executor::new(FrameCost { swimmer, grid }, solver)
        .configure(|s| s.max_iters(4000))
        .run()
        .map_err(|e| GaitError::InvalidParams(format!("frame optimization failed: {e}")))?;
    let state = res.state();
    let best = state.best_param.clone().unwrap_or(x0);
    let objective = state.best_cost;
    if !(objective < initial_objective - 1e-12) {
        return Ok(FrameOptimization { frame: init, objective: initial_objective, initial_objective, already_optimal: true });
    }
    Ok(FrameOptimization { frame: weights_from_params(&best), objective, initial_objective, already_optimal: false })
}
