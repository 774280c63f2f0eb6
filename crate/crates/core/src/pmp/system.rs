//! Hamiltonian system of the displacement-maximizing control problem.
//!
//! State `z = (phi1, phi2, theta)` with `dphi = u`, `dtheta = p u1 + q u2`;
//! the running cost is `dx = g u1 + h u2`, where `(g, h)` is the x-row of
//! `R(theta) A(phi)` and `(p, q)` the rotation row of `A`. The cost sign
//! `kappa` selects maximization (+1) or minimization (-1) of `x`.

use num_dual::Dual2SVec64;

use crate::error::{GaitError, Result};
use crate::models::ConnectionModel;

/// Full OCP state vector `(phi1, phi2, theta, lambda1, lambda2, lambda3)`.
pub type StateVec = [f64; 6];

/// `(g, h)`: world x-row of the reconstruction matrix.
pub fn cost_integrand<M: ConnectionModel>(model: &M, phi1: f64, phi2: f64, theta: f64) -> Result<(f64, f64)> {
    let a = model.connection_at(phi1, phi2)?;
    let (s, c) = theta.sin_cos();
    Ok((c * a[0][0] - s * a[1][0], c * a[0][1] - s * a[1][1]))
}

/// Values and exact first and second partials of `g, h, p, q` at one state,
/// together with the singular-arc quantities built from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Local {
    /// `[g, h, p, q]`, already multiplied by the cost sign where applicable.
    pub f: [f64; 4],
    /// `grad[k][i] = d f_k / d z_i`.
    pub grad: [[f64; 3]; 4],
    /// `hess[k][i][j]`.
    pub hess: [[[f64; 3]; 3]; 4],
}

impl Local {
    pub fn at<M: ConnectionModel>(model: &M, z: [f64; 3], kappa: f64) -> Result<Self> {
        let var = |i: usize| Dual2SVec64::<3>::from_re(z[i]).derivative(i);
        let (p1, p2, th) = (var(0), var(1), var(2));
        let a = model.connection_at(p1, p2)?;
        let (s, c) = num_dual::DualNum::sin_cos(&th);
        let fk = [
            (c * a[0][0] - s * a[1][0]) * kappa,
            (c * a[0][1] - s * a[1][1]) * kappa,
            a[2][0],
            a[2][1],
        ];
        let mut f = [0.0; 4];
        let mut grad = [[0.0; 3]; 4];
        let mut hess = [[[0.0; 3]; 3]; 4];
        for k in 0..4 {
            f[k] = fk[k].re;
            if let Some(g) = &fk[k].v1.0 {
                for i in 0..3 {
                    grad[k][i] = g[i];
                }
            }
            if let Some(h) = &fk[k].v2.0 {
                for i in 0..3 {
                    for j in 0..3 {
                        hess[k][i][j] = h[(i, j)];
                    }
                }
            }
        }
        Ok(Local { f, grad, hess })
    }

    pub fn g(&self) -> f64 {
        self.f[0]
    }
    pub fn h(&self) -> f64 {
        self.f[1]
    }
    pub fn p(&self) -> f64 {
        self.f[2]
    }
    pub fn q(&self) -> f64 {
        self.f[3]
    }

    /// Coefficient of `lambda3` in `psi`.
    pub fn psi_lambda3(&self) -> f64 {
        self.grad[2][1] - self.grad[3][0]
    }

    /// `psi = g_phi2 - h_phi1 + g_theta q - h_theta p + lambda3 (p_phi2 - q_phi1)`,
    /// the time derivative of `H_u` along a singular arc divided by the control.
    pub fn psi(&self, lambda3: f64) -> f64 {
        let gr = &self.grad;
        gr[0][1] - gr[1][0] + gr[0][2] * self.q() - gr[1][2] * self.p() + lambda3 * self.psi_lambda3()
    }

    /// `d psi / d z` at fixed `lambda3`.
    pub fn psi_grad(&self, lambda3: f64) -> [f64; 3] {
        let (gr, he) = (&self.grad, &self.hess);
        std::array::from_fn(|k| {
            he[0][1][k] - he[1][0][k] + he[0][2][k] * self.q() + gr[0][2] * gr[3][k]
                - he[1][2][k] * self.p()
                - gr[1][2] * gr[2][k]
                + lambda3 * (he[2][1][k] - he[3][0][k])
        })
    }

    /// Coefficients of `dpsi/dt = A u1 + B u2` along the singular arc.
    pub fn switching_coefficients(&self, lambda3: f64) -> (f64, f64) {
        let pz = self.psi_grad(lambda3);
        let pl = self.psi_lambda3();
        let a = pz[0] + pz[2] * self.p() - pl * self.grad[0][2];
        let b = pz[1] + pz[2] * self.q() - pl * self.grad[1][2];
        (a, b)
    }

    /// `H_u = (g + lambda1 + lambda3 p, h + lambda2 + lambda3 q)`.
    pub fn h_u(&self, y: &StateVec) -> [f64; 2] {
        [self.g() + y[3] + y[5] * self.p(), self.h() + y[4] + y[5] * self.q()]
    }

    pub fn hamiltonian(&self, y: &StateVec, u: [f64; 2]) -> f64 {
        let hu = self.h_u(y);
        hu[0] * u[0] + hu[1] * u[1]
    }

    /// `d lambda / dt = -dH/dz`.
    pub fn costate_rate(&self, lambda3: f64, u: [f64; 2]) -> [f64; 3] {
        let gr = &self.grad;
        std::array::from_fn(|i| {
            let cost = gr[0][i] * u[0] + gr[1][i] * u[1];
            let rot = if i < 2 { gr[2][i] * u[0] + gr[3][i] * u[1] } else { 0.0 };
            -(cost + lambda3 * rot)
        })
    }

    pub fn state_rate(&self, y: &StateVec, u: [f64; 2]) -> StateVec {
        let l = self.costate_rate(y[5], u);
        [u[0], u[1], self.p() * u[0] + self.q() * u[1], l[0], l[1], l[2]]
    }
}

/// Control law on an arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Control {
    /// `u = sigma (B, -A) / |(A, B)|`, keeping `psi` constant.
    Singular { sigma: f64 },
    /// Bound arc on `phi2 = b` with `u = (u1, 0)`.
    Bound { u1: f64 },
}

impl Control {
    /// Control vector at a state.
    pub fn at(self, local: &Local, y: &StateVec, t: f64) -> Result<[f64; 2]> {
        match self {
            Control::Singular { sigma } => singular_control(local, y, sigma, t),
            Control::Bound { u1 } => Ok([u1, 0.0]),
        }
    }
}

/// Multiplier of the constraint `b - phi2 >= 0` on a bound arc, adjoined
/// directly so that `dlambda2/dt = -H_phi2 + mu`. Choosing `mu = u1 psi`
/// keeps `H_u2` at zero along the arc; optimality needs `mu >= 0`.
pub fn bound_multiplier(local: &Local, y: &StateVec, u1: f64) -> f64 {
    u1 * local.psi(y[5])
}

pub const BREAKDOWN_THRESHOLD: f64 = 1e-20;

/// Unit singular control at a state, or breakdown where its direction is undefined.
pub fn singular_control(local: &Local, y: &StateVec, sigma: f64, t: f64) -> Result<[f64; 2]> {
    let (a, b) = local.switching_coefficients(y[5]);
    let n2 = a * a + b * b;
    if !(n2 >= BREAKDOWN_THRESHOLD) {
        return Err(GaitError::SingularArcBreakdown { phi1: y[0], phi2: y[1], t });
    }
    let n = n2.sqrt();
    Ok([sigma * b / n, -sigma * a / n])
}

/// Right-hand side of the state-costate system under `control`.
pub fn rhs<M: ConnectionModel>(model: &M, kappa: f64, control: Control, t: f64, y: &StateVec) -> Result<StateVec> {
    let local = Local::at(model, [y[0], y[1], y[2]], kappa)?;
    let u = control.at(&local, y, t)?;
    let mut dy = local.state_rate(y, u);
    if let Control::Bound { u1 } = control {
        dy[4] += bound_multiplier(&local, y, u1);
    }
    Ok(dy)
}

/// Root of `psi(z, lambda3) = 0`, which is affine in `lambda3`.
pub fn initial_lambda3(local: &Local) -> Result<f64> {
    let c = local.psi_lambda3();
    if c.abs() < 1e-14 {
        return Err(GaitError::NoRoot(format!("psi does not depend on lambda3 (coefficient {c:e})")));
    }
    Ok(-local.psi(0.0) / c)
}

/// Initial costate on the diagonal: `lambda3` from `psi = 0`, then
/// `lambda1` from `H_u1 = 0` and `lambda2 = -lambda1`.
pub fn initial_costate<M: ConnectionModel>(model: &M, d: f64, kappa: f64) -> Result<StateVec> {
    let local = Local::at(model, [d, d, 0.0], kappa)?;
    let l3 = initial_lambda3(&local)?;
    let l1 = -local.g() - l3 * local.p();
    Ok([d, d, 0.0, l1, -l1, l3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Swimmer;

    fn model() -> Swimmer {
        Swimmer::purcell_default()
    }

    #[test]
    fn cost_row_rotates_with_theta() {
        let m = model();
        let a = m.connection_at(0.4, -0.9).unwrap();
        let (g, h) = cost_integrand(&m, 0.4, -0.9, 0.0).unwrap();
        assert_eq!((g, h), (a[0][0], a[0][1]));
        let (g, h) = cost_integrand(&m, 0.4, -0.9, std::f64::consts::PI).unwrap();
        assert!((g + a[0][0]).abs() < 1e-15 && (h + a[0][1]).abs() < 1e-15);
    }

    #[test]
    fn local_partials_match_differences() {
        let m = model();
        let z = [0.7, -0.3, 0.4];
        let l = Local::at(&m, z, 1.0).unwrap();
        let e = 1e-6;
        for i in 0..3 {
            let mut zp = z;
            let mut zm = z;
            zp[i] += e;
            zm[i] -= e;
            let (lp, lm) = (Local::at(&m, zp, 1.0).unwrap(), Local::at(&m, zm, 1.0).unwrap());
            for k in 0..4 {
                let fd = (lp.f[k] - lm.f[k]) / (2.0 * e);
                assert!((fd - l.grad[k][i]).abs() < 1e-8);
                for j in 0..3 {
                    let fd2 = (lp.grad[k][j] - lm.grad[k][j]) / (2.0 * e);
                    assert!((fd2 - l.hess[k][j][i]).abs() < 1e-7);
                }
            }
            let fd = (lp.psi(0.3) - lm.psi(0.3)) / (2.0 * e);
            assert!((fd - l.psi_grad(0.3)[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn lambda3_root_is_exact() {
        let m = model();
        let y = initial_costate(&m, 1.2, 1.0).unwrap();
        let l = Local::at(&m, [1.2, 1.2, 0.0], 1.0).unwrap();
        assert!(l.psi(y[5]).abs() < 1e-12);
        let hu = l.h_u(&y);
        assert!(hu[0].abs() < 1e-14 && hu[1].abs() < 1e-12);
    }

    #[test]
    fn degenerate_lambda3_coefficient() {
        let l = Local { f: [0.0; 4], grad: [[0.0; 3]; 4], hess: [[[0.0; 3]; 3]; 4] };
        assert!(matches!(initial_lambda3(&l), Err(GaitError::NoRoot(_))));
    }

    #[test]
    fn breakdown_reported() {
        let l = Local { f: [0.0; 4], grad: [[0.0; 3]; 4], hess: [[[0.0; 3]; 3]; 4] };
        let y = [0.1, 0.2, 0.0, 0.0, 0.0, 0.0];
        assert!(matches!(singular_control(&l, &y, 1.0, 2.0), Err(GaitError::SingularArcBreakdown { .. })));
    }
}
