use serde::{Deserialize, Serialize};

use super::kinematics::assemble;
use crate::error::{GaitError, Result};
use crate::scalar::{cond3, solve3x2, Scalar};

/// Condition-number ceiling above which the body block is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Low-Reynolds-number swimmer with slender links under resistive force theory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurcellParams {
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    /// tangential drag per unit length
    pub ct: f64,
    /// normal drag per unit length
    pub cn: f64,
}

impl Default for PurcellParams {
    fn default() -> Self {
        Self {
            l0: 1.0 / 3.0,
            l1: 1.0 / 3.0,
            l2: 1.0 / 3.0,
            ct: 1.0,
            cn: 2.0,
        }
    }
}

impl PurcellParams {
    /// Checks the model invariants. `allow_isotropic` admits `cn == ct`, the
    /// no-propulsion limit used in tests.
    pub fn validate(&self, allow_isotropic: bool) -> Result<()> {
        let bad = |m: &str| Err(GaitError::InvalidParams(m.to_string()));
        if !(self.l0 > 0.0 && self.l1 > 0.0 && self.l2 > 0.0) {
            return bad("link lengths must be positive");
        }
        if (self.l1 - self.l2).abs() > 1e-12 * self.l1.max(self.l2) {
            return bad("outer links must have equal length (l1 == l2)");
        }
        if !(self.ct > 0.0) {
            return bad("ct must be positive");
        }
        if self.cn < self.ct || (!allow_isotropic && self.cn == self.ct) {
            return bad("drag must satisfy cn > ct > 0");
        }
        Ok(())
    }

    pub fn lengths(&self) -> [f64; 3] {
        [self.l0, self.l1, self.l2]
    }

    /// Link-frame resistance diagonals (tangential, normal, rotational).
    pub fn drag_diagonals(&self) -> [[f64; 3]; 3] {
        self.lengths()
            .map(|l| [self.ct * l, self.cn * l, self.cn * l * l * l / 12.0])
    }

    pub fn connection<T: Scalar>(&self, phi1: T, phi2: T) -> Result<[[T; 2]; 3]> {
        // Force balance: sum_i -J_i^T D_i J_i = [C_q | C_phi]; A = -C_q^-1 C_phi.
        let k = assemble(self.lengths(), phi1, phi2, &self.drag_diagonals());
        let cq = std::array::from_fn(|i| std::array::from_fn(|j| -k[i][j]));
        let cphi = std::array::from_fn(|i| std::array::from_fn(|j| k[i][3 + j]));
        let cq_re: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| k[i][j].re()));
        let cond = cond3(&cq_re);
        if !(cond < MAX_CONDITION) {
            return Err(GaitError::SingularResistance(cond));
        }
        // -C_q^-1 C_phi with C = -K  ==  -(K_q)^-1 K_phi  ==  (-K_q)^-1 K_phi
        Ok(solve3x2(cq, cphi))
    }
}
