use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::kinematics::assemble;
use crate::error::{GaitError, Result};
use crate::scalar::{cond3, solve3x2, Scalar};

/// Form of the rotational added-mass term of an elliptic link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationalAddedMass {
    /// Classical potential-flow value `pi rho (a^2 - b^2)^2 / 8`.
    #[default]
    Squared,
    /// `pi rho (a^2 - b^2) / 8`, kept for comparison runs.
    Linear,
}

/// Inviscid potential-flow swimmer made of three elliptic links.
///
/// Link `i` is an ellipse with semi-axes `a_i` (along the link) and `b_i`,
/// so the link length is `2 a_i`. Link masses and inertias are those of solid
/// ellipses of density `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfectFluidParams {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub rho: f64,
    #[serde(default)]
    pub rotational_added_mass: RotationalAddedMass,
}

impl Default for PerfectFluidParams {
    fn default() -> Self {
        Self::from_ratios(1.0 / 3.0, 0.2, 1.0)
    }
}

impl PerfectFluidParams {
    /// Builds a swimmer of total length 1 from the length ratio `eta` and the
    /// axis ratio `alpha`.
    ///
    /// `eta` is the middle-link share of the total length, `l0 = eta`, so
    /// `eta = 1/3` is the equal-link swimmer and `eta = 1/2` has outer links
    /// half as long as the middle one. `alpha = b_i / a_i` is the
    /// minor-to-major axis ratio of every link.
    pub fn from_ratios(eta: f64, alpha: f64, rho: f64) -> Self {
        let l0 = eta;
        let lo = 0.5 * (1.0 - eta);
        let a = [0.5 * l0, 0.5 * lo, 0.5 * lo];
        Self {
            a,
            b: a.map(|ai| alpha * ai),
            rho,
            rotational_added_mass: RotationalAddedMass::Squared,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(GaitError::InvalidParams(m.to_string()));
        if !(self.rho > 0.0) {
            return bad("rho must be positive");
        }
        for i in 0..3 {
            if !(self.a[i] > 0.0 && self.b[i] > 0.0) {
                return bad("ellipse semi-axes must be positive");
            }
        }
        if (self.a[1] - self.a[2]).abs() > 1e-12 || (self.b[1] - self.b[2]).abs() > 1e-12 {
            return bad("outer links must be identical");
        }
        Ok(())
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.a.map(|a| 2.0 * a)
    }

    pub fn eta(&self) -> f64 {
        let l = self.lengths();
        l[0] / (l[0] + l[1] + l[2])
    }

    pub fn alpha(&self) -> f64 {
        self.b[0] / self.a[0]
    }

    /// Solid-ellipse mass and centroidal inertia of link `i`.
    pub fn mass_inertia(&self, i: usize) -> (f64, f64) {
        let (a, b) = (self.a[i], self.b[i]);
        let m = self.rho * PI * a * b;
        (m, m * (a * a + b * b) / 4.0)
    }

    /// Link-frame diagonal of body plus added mass for link `i`.
    pub fn link_mass_diagonal(&self, i: usize) -> [f64; 3] {
        let (a, b) = (self.a[i], self.b[i]);
        let (m, inertia) = self.mass_inertia(i);
        let d = a * a - b * b;
        let rot = match self.rotational_added_mass {
            RotationalAddedMass::Squared => d * d / 8.0,
            RotationalAddedMass::Linear => d / 8.0,
        };
        let pr = PI * self.rho;
        [m + pr * b * b, m + pr * a * a, inertia + pr * rot]
    }

    /// The body-body block `M_bb(phi)` (real part only).
    pub fn body_inertia(&self, phi1: f64, phi2: f64) -> [[f64; 3]; 3] {
        let diag = [0, 1, 2].map(|i| self.link_mass_diagonal(i));
        let m = assemble::<f64>(self.lengths(), phi1, phi2, &diag);
        std::array::from_fn(|i| std::array::from_fn(|j| m[i][j]))
    }

    pub fn connection<T: Scalar>(&self, phi1: T, phi2: T) -> Result<[[T; 2]; 3]> {
        let diag = [0, 1, 2].map(|i| self.link_mass_diagonal(i));
        let m = assemble(self.lengths(), phi1, phi2, &diag);
        let mbb: [[T; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| m[i][j]));
        let mbs: [[T; 2]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| -m[i][3 + j]));
        let re: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].re()));
        let cond = cond3(&re);
        if !(cond < super::purcell::MAX_CONDITION) {
            return Err(GaitError::SingularInertia(cond));
        }
        // A = -M_bb^-1 M_bs
        Ok(solve3x2(mbb, mbs))
    }
}
