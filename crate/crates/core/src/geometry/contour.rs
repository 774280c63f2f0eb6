use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::field::HeightField;
use super::junction::{detect_junctions, Junction, JunctionOptions};
use crate::connection::polygon_area;
use crate::error::{GaitError, Result};
use crate::types::ShapePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContourKind {
    ClosedLoop,
    /// Both ends on the window boundary.
    Open,
    /// Passes through a junction; closed or not.
    JunctionBearing,
}

/// One zero-level polyline. Closed loops do not repeat their first vertex.
/// Vertices run with the positive side of the field on the left, so a loop
/// around a positive lobe is counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub points: Vec<ShapePoint>,
    pub closed: bool,
    pub kind: ContourKind,
}

impl Contour {
    /// Signed shoelace area (zero for open contours).
    pub fn area(&self) -> f64 {
        if self.closed {
            polygon_area(&self.points)
        } else {
            0.0
        }
    }

    /// Even-odd point-in-polygon test; false for open contours.
    pub fn encloses(&self, p: ShapePoint) -> bool {
        if !self.closed {
            return false;
        }
        let v = &self.points;
        let mut inside = false;
        let mut k = v.len() - 1;
        for i in 0..v.len() {
            let (a, b) = (v[i], v[k]);
            if (a.phi2 > p.phi2) != (b.phi2 > p.phi2)
                && p.phi1 < (b.phi1 - a.phi1) * (p.phi2 - a.phi2) / (b.phi2 - a.phi2) + a.phi1
            {
                inside = !inside;
            }
            k = i;
        }
        inside
    }

    pub fn length(&self) -> f64 {
        let n = self.points.len();
        let m = if self.closed { n } else { n.saturating_sub(1) };
        (0..m).map(|i| self.points[i].dist(self.points[(i + 1) % n])).sum()
    }

    /// Resamples to at most `max` vertices equally spaced in arc length.
    pub fn resampled(&self, max: usize) -> Vec<ShapePoint> {
        let n = self.points.len();
        if n <= max || max < 3 {
            return self.points.clone();
        }
        let segs = if self.closed { n } else { n - 1 };
        let mut cum = vec![0.0];
        for i in 0..segs {
            cum.push(cum[i] + self.points[i].dist(self.points[(i + 1) % n]));
        }
        let total = cum[segs];
        let m = if self.closed { max } else { max - 1 };
        let mut out = Vec::with_capacity(max);
        let mut k = 0;
        for s in 0..max {
            let target = total * s as f64 / m as f64;
            while k + 1 < segs && cum[k + 1] < target {
                k += 1;
            }
            let len = cum[k + 1] - cum[k];
            let u = if len > 0.0 { ((target - cum[k]) / len).clamp(0.0, 1.0) } else { 0.0 };
            let (a, b) = (self.points[k], self.points[(k + 1) % n]);
            out.push(a + (b - a) * u);
        }
        out
    }
}

/// Zero-level set of a height field with its junctions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSet {
    pub contours: Vec<Contour>,
    pub junctions: Vec<Junction>,
}

impl ContourSet {
    /// Closed junction-free loops.
    pub fn loops(&self) -> impl Iterator<Item = &Contour> {
        self.contours.iter().filter(|c| c.kind == ContourKind::ClosedLoop)
    }

    /// Smallest closed contour (of any kind) enclosing `p`.
    pub fn innermost_around(&self, p: ShapePoint) -> Option<&Contour> {
        self.contours
            .iter()
            .filter(|c| c.encloses(p))
            .min_by(|a, b| a.area().abs().total_cmp(&b.area().abs()))
    }

    /// Closed contours enclosing `p`, from the inside out.
    pub fn nested_around(&self, p: ShapePoint) -> Vec<&Contour> {
        let mut v: Vec<&Contour> = self.contours.iter().filter(|c| c.encloses(p)).collect();
        v.sort_by(|a, b| a.area().abs().total_cmp(&b.area().abs()));
        v
    }

    /// One CSV row per vertex: `contour,kind,phi1,phi2`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "contour,kind,phi1,phi2")?;
        for (k, c) in self.contours.iter().enumerate() {
            let kind = match c.kind {
                ContourKind::ClosedLoop => "closed-loop",
                ContourKind::Open => "open",
                ContourKind::JunctionBearing => "junction-bearing",
            };
            for p in &c.points {
                writeln!(w, "{k},{kind},{},{}", p.phi1, p.phi2)?;
            }
        }
        Ok(())
    }
}

/// Grid edge carrying a crossing: horizontal `(i,j)-(i+1,j)` or vertical `(i,j)-(i,j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

fn positive(v: f64) -> bool {
    v >= 0.0
}

fn crossing(field: &HeightField, e: Edge) -> ShapePoint {
    let ((i0, j0), (i1, j1)) = match e {
        Edge::H(i, j) => ((i, j), (i + 1, j)),
        Edge::V(i, j) => ((i, j), (i, j + 1)),
    };
    let (v0, v1) = (field.value(i0, j0), field.value(i1, j1));
    let t = if v0 == v1 { 0.5 } else { (v0 / (v0 - v1)).clamp(0.0, 1.0) };
    let (a, b) = (field.node(i0, j0), field.node(i1, j1));
    a + (b - a) * t
}

/// Directed zero-level segments of one cell, positive side on the left.
fn cell_segments(field: &HeightField, i: usize, j: usize, out: &mut Vec<(Edge, Edge)>) {
    let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
    let v = corners.map(|(a, b)| field.value(a, b));
    let s = v.map(positive);
    // edge k joins corner k and corner k+1
    let edges = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
    let cut: Vec<usize> = (0..4).filter(|&k| s[k] != s[(k + 1) % 4]).collect();
    // walking the cell boundary ccw, the positive side stays on the left of a
    // segment that starts where the sign drops and ends where it rises
    let mut push = |ea: usize, eb: usize| {
        if s[ea] {
            out.push((edges[ea], edges[eb]));
        } else {
            out.push((edges[eb], edges[ea]));
        }
    };
    match cut.len() {
        2 => push(cut[0], cut[1]),
        4 => {
            // saddle cell: the centre sample decides which diagonal pair is joined
            let joined_02 = positive(field.center(i, j)) == s[0];
            let isolated = if joined_02 { [1, 3] } else { [0, 2] };
            for k in isolated {
                // corner k is cut off between edges k-1 and k
                push((k + 3) % 4, k);
            }
        }
        _ => {}
    }
}

/// Marching squares at level 0 with chained polylines.
///
/// Ambiguous cells are resolved by the cell-centre sample; chains whose ends
/// meet within half a cell are closed. Junctions are located with default
/// options; see [`extract_zero_contours_with`].
pub fn extract_zero_contours(field: &HeightField) -> Result<ContourSet> {
    extract_zero_contours_with(field, &JunctionOptions::default())
}

pub fn extract_zero_contours_with(field: &HeightField, opts: &JunctionOptions) -> Result<ContourSet> {
    let chains = chain(field);
    if chains.is_empty() {
        return Err(GaitError::EmptyContour);
    }
    let mut contours: Vec<Contour> = chains
        .into_iter()
        .map(|(points, closed)| Contour {
            kind: if closed { ContourKind::ClosedLoop } else { ContourKind::Open },
            points,
            closed,
        })
        .collect();
    let junctions = detect_junctions(field, &contours, opts);
    let (h1, h2) = field.cell();
    let slack = h1.hypot(h2);
    for c in &mut contours {
        if junctions.iter().any(|j| c.points.iter().any(|p| p.dist(j.point) <= j.radius + slack)) {
            c.kind = ContourKind::JunctionBearing;
        }
    }
    Ok(ContourSet { contours, junctions })
}

fn chain(field: &HeightField) -> Vec<(Vec<ShapePoint>, bool)> {
    let n = field.n;
    let mut segs = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            cell_segments(field, i, j, &mut segs);
        }
    }
    let mut from: HashMap<Edge, usize> = HashMap::with_capacity(segs.len());
    let mut to: HashMap<Edge, usize> = HashMap::with_capacity(segs.len());
    for (k, &(a, b)) in segs.iter().enumerate() {
        from.insert(a, k);
        to.insert(b, k);
    }
    let mut used = vec![false; segs.len()];
    let mut out = Vec::new();
    let (h1, h2) = field.cell();
    for k0 in 0..segs.len() {
        if used[k0] {
            continue;
        }
        used[k0] = true;
        let mut fwd = vec![segs[k0].0, segs[k0].1];
        let mut closed = false;
        let mut k = k0;
        while let Some(&next) = from.get(&segs[k].1) {
            if next == k0 {
                closed = true;
                break;
            }
            if used[next] {
                break;
            }
            used[next] = true;
            fwd.push(segs[next].1);
            k = next;
        }
        if !closed {
            let mut back = Vec::new();
            let mut k = k0;
            while let Some(&prev) = to.get(&segs[k].0) {
                if used[prev] {
                    break;
                }
                used[prev] = true;
                back.push(segs[prev].0);
                k = prev;
            }
            back.reverse();
            back.extend(fwd);
            fwd = back;
        } else {
            fwd.pop();
        }
        let mut pts: Vec<ShapePoint> = fwd.into_iter().map(|e| crossing(field, e)).collect();
        pts.dedup_by(|a, b| a.dist(*b) < 1e-12);
        if !closed && pts.len() > 2 && pts[0].dist(*pts.last().unwrap()) < 0.5 * h1.min(h2) {
            pts.pop();
            closed = true;
        }
        if closed && pts.len() > 1 && pts[0].dist(*pts.last().unwrap()) < 1e-12 {
            pts.pop();
        }
        if pts.len() >= 2 {
            out.push((pts, closed));
        }
    }
    out
}
