use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

/// A point in joint-angle space, radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ShapePoint {
    pub phi1: f64,
    pub phi2: f64,
}

impl ShapePoint {
    pub const fn new(phi1: f64, phi2: f64) -> Self {
        Self { phi1, phi2 }
    }

    pub fn norm(self) -> f64 {
        self.phi1.hypot(self.phi2)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.phi1.is_finite() && self.phi2.is_finite()
    }
}

impl Add for ShapePoint {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.phi1 + o.phi1, self.phi2 + o.phi2)
    }
}

impl Sub for ShapePoint {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.phi1 - o.phi1, self.phi2 - o.phi2)
    }
}

impl Mul<f64> for ShapePoint {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.phi1 * k, self.phi2 * k)
    }
}

/// Planar pose of the body frame: position and heading.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyPose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl BodyPose {
    pub const IDENTITY: Self = Self { x: 0.0, y: 0.0, theta: 0.0 };

    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.x, self.y, self.theta]
    }
}

/// Body-frame twist of the reference link.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyVelocity {
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
}

impl BodyVelocity {
    pub const fn new(vx: f64, vy: f64, omega: f64) -> Self {
        Self { vx, vy, omega }
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.vx, self.vy, self.omega]
    }
}

/// The 3x2 local connection: rows (vx, vy, omega), columns (d/dphi1, d/dphi2).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LocalConnection(pub [[f64; 2]; 3]);

impl LocalConnection {
    pub fn column(&self, j: usize) -> BodyVelocity {
        BodyVelocity::new(self.0[0][j], self.0[1][j], self.0[2][j])
    }

    /// Body velocity produced by the joint rates `dphi`.
    pub fn apply(&self, dphi: ShapePoint) -> BodyVelocity {
        let r = |i: usize| self.0[i][0] * dphi.phi1 + self.0[i][1] * dphi.phi2;
        BodyVelocity::new(r(0), r(1), r(2))
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
