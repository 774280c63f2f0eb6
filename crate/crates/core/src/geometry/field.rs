use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{curvature_exact, BodyFrameSpec, Framed, Window};
use crate::error::{GaitError, Result};
use crate::models::{ConnectionModel, Swimmer};
use crate::types::ShapePoint;

/// Which row of the total curvature is plotted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    #[default]
    X,
    Y,
    Theta,
}

impl Component {
    pub fn index(self) -> usize {
        match self {
            Component::X => 0,
            Component::Y => 1,
            Component::Theta => 2,
        }
    }
}

impl std::str::FromStr for Component {
    type Err = GaitError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Component::X),
            "y" => Ok(Component::Y),
            "theta" => Ok(Component::Theta),
            _ => Err(GaitError::InvalidParams(format!("unknown component {s:?}"))),
        }
    }
}

pub const MIN_GRID: usize = 33;

/// Samples of one curvature row on a regular `n x n` grid, plus one sample
/// at the centre of every cell for resolving ambiguous marching-squares cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightField {
    pub window: Window,
    pub n: usize,
    pub component: Component,
    /// `None` for synthetic fields.
    pub frame: Option<BodyFrameSpec>,
    /// Node values, index `j * n + i` with `i` along `phi1`.
    pub values: Vec<f64>,
    /// Cell-centre values, index `j * (n - 1) + i`.
    pub centers: Vec<f64>,
}

/// Value of one curvature row at a shape.
pub fn height_at<M: ConnectionModel>(model: &M, component: Component, phi: ShapePoint) -> Result<f64> {
    Ok(curvature_exact(model, phi)?[component.index()])
}

/// Height field of `swimmer` expressed in `frame`.
pub fn sample_height_field(
    swimmer: &Swimmer,
    frame: &BodyFrameSpec,
    window: Window,
    n: usize,
    component: Component,
) -> Result<HeightField> {
    swimmer.validate()?;
    frame.validate()?;
    let model = Framed::new(swimmer, *frame);
    let mut f = HeightField::from_fn(window, n, component, |p| height_at(&model, component, p))?;
    f.frame = Some(*frame);
    Ok(f)
}

impl HeightField {
    /// Samples an arbitrary scalar function, in parallel over rows.
    pub fn from_fn<F>(window: Window, n: usize, component: Component, f: F) -> Result<Self>
    where
        F: Fn(ShapePoint) -> Result<f64> + Sync,
    {
        window.validate()?;
        if n < MIN_GRID {
            return Err(GaitError::InvalidParams(format!("grid must be at least {MIN_GRID} points, got {n}")));
        }
        let (h1, h2) = Self::steps(&window, n);
        let row = |j: usize, m: usize, off: f64| -> Result<Vec<f64>> {
            (0..m)
                .map(|i| {
                    let p = ShapePoint::new(
                        window.phi1.0 + (i as f64 + off) * h1,
                        window.phi2.0 + (j as f64 + off) * h2,
                    );
                    let v = f(p)?;
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(GaitError::InvalidParams(format!("non-finite height at ({}, {})", p.phi1, p.phi2)))
                    }
                })
                .collect()
        };
        let values: Vec<Vec<f64>> = (0..n).into_par_iter().map(|j| row(j, n, 0.0)).collect::<Result<_>>()?;
        let centers: Vec<Vec<f64>> = (0..n - 1).into_par_iter().map(|j| row(j, n - 1, 0.5)).collect::<Result<_>>()?;
        Ok(HeightField {
            window,
            n,
            component,
            frame: None,
            values: values.concat(),
            centers: centers.concat(),
        })
    }

    fn steps(window: &Window, n: usize) -> (f64, f64) {
        let d = (n - 1) as f64;
        ((window.phi1.1 - window.phi1.0) / d, (window.phi2.1 - window.phi2.0) / d)
    }

    /// Cell sizes along `phi1` and `phi2`.
    pub fn cell(&self) -> (f64, f64) {
        Self::steps(&self.window, self.n)
    }

    pub fn node(&self, i: usize, j: usize) -> ShapePoint {
        let (h1, h2) = self.cell();
        ShapePoint::new(self.window.phi1.0 + i as f64 * h1, self.window.phi2.0 + j as f64 * h2)
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n + i]
    }

    pub fn center(&self, i: usize, j: usize) -> f64 {
        self.centers[j * (self.n - 1) + i]
    }

    /// `(min, max)` over the nodes.
    pub fn range(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Larger side of the window.
    pub fn size(&self) -> f64 {
        (self.window.phi1.1 - self.window.phi1.0).max(self.window.phi2.1 - self.window.phi2.0)
    }

    /// Bilinear interpolation, clamped to the window.
    pub fn interpolate(&self, p: ShapePoint) -> f64 {
        let (h1, h2) = self.cell();
        let m = (self.n - 1) as f64;
        let x = ((p.phi1 - self.window.phi1.0) / h1).clamp(0.0, m);
        let y = ((p.phi2 - self.window.phi2.0) / h2).clamp(0.0, m);
        let i = (x.floor() as usize).min(self.n - 2);
        let j = (y.floor() as usize).min(self.n - 2);
        let (u, v) = (x - i as f64, y - j as f64);
        let f = |a, b| self.value(a, b);
        (1.0 - u) * (1.0 - v) * f(i, j) + u * (1.0 - v) * f(i + 1, j) + u * v * f(i + 1, j + 1) + (1.0 - u) * v * f(i, j + 1)
    }

    /// Central-difference gradient and Hessian at an interior node.
    pub fn local_quadratic(&self, i: usize, j: usize) -> ([f64; 2], [[f64; 2]; 2]) {
        let (h1, h2) = self.cell();
        let f = |a: usize, b: usize| self.value(a, b);
        let g = [(f(i + 1, j) - f(i - 1, j)) / (2.0 * h1), (f(i, j + 1) - f(i, j - 1)) / (2.0 * h2)];
        let kxx = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / (h1 * h1);
        let kyy = (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / (h2 * h2);
        let kxy = (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / (4.0 * h1 * h2);
        (g, [[kxx, kxy], [kxy, kyy]])
    }

    /// Node samples as CSV `phi1,phi2,h`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "phi1,phi2,h")?;
        for j in 0..self.n {
            for i in 0..self.n {
                let p = self.node(i, j);
                writeln!(w, "{},{},{}", p.phi1, p.phi2, self.value(i, j))?;
            }
        }
        Ok(())
    }
}
