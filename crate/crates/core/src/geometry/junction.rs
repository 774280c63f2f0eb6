use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::contour::Contour;
use super::field::HeightField;
use crate::types::ShapePoint;

/// Tuning of junction detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionOptions {
    /// Newton on the gradient stops at a node once `|grad H|` there falls
    /// below this share of `(field range) / (window size)`.
    pub gradient_factor: f64,
    /// A saddle counts as lying on the zero level when `|H|` there is below
    /// this share of the field range.
    pub level_factor: f64,
    /// Smallest radius, in cells, of the circle on which branches are counted.
    pub radius_cells: f64,
    /// Contour vertices further apart than this many steps along the same
    /// contour count as separate branches.
    pub branch_gap: usize,
}

impl Default for JunctionOptions {
    fn default() -> Self {
        JunctionOptions { gradient_factor: 1e-3, level_factor: 1e-2, radius_cells: 2.0, branch_gap: 8 }
    }
}

/// A point where zero-level branches meet: a saddle of the field lying on,
/// or within the level tolerance of, the zero level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub point: ShapePoint,
    /// Field value at the saddle from the local quadratic model.
    pub value: f64,
    /// Zero-level branches leaving the junction.
    pub branches: usize,
    /// Radius of the circle the branches were counted on; contours passing
    /// closer than this carry the junction.
    pub radius: f64,
}

/// Flags candidate cells and refines each to a saddle by Newton's method.
///
/// Candidates are ambiguous marching-squares cells, cells where two distinct
/// contour branches come within one cell of each other, and every grid node
/// whose local quadratic is a saddle. A candidate is a junction if Newton on
/// `grad H = 0` converges to a saddle whose value is within the level
/// tolerance and at least three zero-level branches cross a circle around it.
/// The circle is wide enough to separate the branches of a saddle sitting
/// slightly off the zero level.
pub fn detect_junctions(field: &HeightField, contours: &[Contour], opts: &JunctionOptions) -> Vec<Junction> {
    let n = field.n;
    let (h1, h2) = field.cell();
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let s = [field.value(i, j), field.value(i + 1, j), field.value(i + 1, j + 1), field.value(i, j + 1)]
                .map(|v| v >= 0.0);
            if s[0] == s[2] && s[1] == s[3] && s[0] != s[1] {
                candidates.push((i, j));
            }
        }
    }
    // cell -> (contour, vertex index)
    let mut occupancy: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    let to_cell = |p: ShapePoint| {
        let x = ((p.phi1 - field.window.phi1.0) / h1).floor().clamp(0.0, (n - 2) as f64) as usize;
        let y = ((p.phi2 - field.window.phi2.0) / h2).floor().clamp(0.0, (n - 2) as f64) as usize;
        (x, y)
    };
    for (c, contour) in contours.iter().enumerate() {
        for (k, p) in contour.points.iter().enumerate() {
            occupancy.entry(to_cell(*p)).or_default().push((c, k));
        }
    }
    let mut cells: Vec<&(usize, usize)> = occupancy.keys().collect();
    cells.sort();
    for &(i, j) in cells {
        let (c0, k0) = occupancy[&(i, j)][0];
        let separate = |&(c, k): &(usize, usize)| {
            if c != c0 {
                return true;
            }
            let len = contours[c].points.len();
            let d = k.abs_diff(k0);
            let d = if contours[c].closed { d.min(len - d) } else { d };
            d > opts.branch_gap
        };
        let near = (i.saturating_sub(1)..=(i + 1).min(n - 2))
            .flat_map(|a| (j.saturating_sub(1)..=(j + 1).min(n - 2)).map(move |b| (a, b)))
            .filter_map(|cell| occupancy.get(&cell))
            .flatten()
            .any(separate);
        if near {
            candidates.push((i, j));
        }
    }
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let (g, k) = field.local_quadratic(i, j);
            let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
            if det < 0.0 {
                let s = [-(k[1][1] * g[0] - k[0][1] * g[1]) / det, -(-k[1][0] * g[0] + k[0][0] * g[1]) / det];
                if s[0].abs() <= 0.5 * h1 && s[1].abs() <= 0.5 * h2 {
                    candidates.push((i, j));
                }
            }
        }
    }
    candidates.sort();
    candidates.dedup();

    let (lo, hi) = field.range();
    let grad_tol = opts.gradient_factor * (hi - lo) / field.size();
    let level_tol = opts.level_factor * (hi - lo);
    let min_radius = opts.radius_cells * h1.max(h2);
    let mut found: Vec<Junction> = Vec::new();
    for (i, j) in candidates {
        let Some(saddle) = newton_saddle(field, i, j, grad_tol) else {
            continue;
        };
        if saddle.value.abs() > level_tol {
            continue;
        }
        // branches of a saddle at level v separate at |v| = |lambda| r^2 / 2
        let radius = min_radius.max(1.5 * (2.0 * saddle.value.abs() / saddle.curvature).sqrt());
        let branches = branch_count(field, saddle.point, radius);
        if branches < 3 {
            continue;
        }
        let junction = Junction { point: saddle.point, value: saddle.value, branches, radius };
        match found.iter_mut().find(|q| q.point.dist(saddle.point) < 2.0 * min_radius) {
            Some(q) if saddle.value.abs() < q.value.abs() => *q = junction,
            Some(_) => {}
            None => found.push(junction),
        }
    }
    found
}

struct Saddle {
    point: ShapePoint,
    /// Quadratic-model value at the saddle.
    value: f64,
    /// Smaller absolute Hessian eigenvalue.
    curvature: f64,
}

/// Newton iteration on `grad H = 0` using central differences at the
/// nearest node.
fn newton_saddle(field: &HeightField, i: usize, j: usize, grad_tol: f64) -> Option<Saddle> {
    let n = field.n as isize;
    let (h1, h2) = field.cell();
    let (mut a, mut b) = (i as isize, j as isize);
    for _ in 0..12 {
        a = a.clamp(1, n - 2);
        b = b.clamp(1, n - 2);
        let (g, k) = field.local_quadratic(a as usize, b as usize);
        let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
        if !(det < 0.0) {
            return None;
        }
        let tr = k[0][0] + k[1][1];
        let disc = (0.25 * tr * tr - det).sqrt();
        let curvature = (0.5 * tr + disc).abs().min((0.5 * tr - disc).abs());
        let node = field.node(a as usize, b as usize);
        let v0 = field.value(a as usize, b as usize);
        if g[0].hypot(g[1]) <= grad_tol {
            return Some(Saddle { point: node, value: v0, curvature });
        }
        let s = [-(k[1][1] * g[0] - k[0][1] * g[1]) / det, -(-k[1][0] * g[0] + k[0][0] * g[1]) / det];
        let (di, dj) = ((s[0] / h1).round() as isize, (s[1] / h2).round() as isize);
        if di == 0 && dj == 0 {
            let point = ShapePoint::new(node.phi1 + s[0], node.phi2 + s[1]);
            return Some(Saddle { point, value: v0 + 0.5 * (g[0] * s[0] + g[1] * s[1]), curvature });
        }
        a += di.clamp(-3, 3);
        b += dj.clamp(-3, 3);
    }
    None
}

/// Sign changes of the field on a circle around `p`.
fn branch_count(field: &HeightField, p: ShapePoint, radius: f64) -> usize {
    const M: usize = 64;
    let w = &field.window;
    if p.phi1 - radius < w.phi1.0 || p.phi1 + radius > w.phi1.1 || p.phi2 - radius < w.phi2.0 || p.phi2 + radius > w.phi2.1 {
        return 0;
    }
    let s: Vec<bool> = (0..M)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / M as f64;
            field.interpolate(ShapePoint::new(p.phi1 + radius * a.cos(), p.phi2 + radius * a.sin())) >= 0.0
        })
        .collect();
    (0..M).filter(|&k| s[k] != s[(k + 1) % M]).count()
}
