//! Brute-force reference computations for the gaitforge test suite.
//!
//! Nothing here shares code with the kernel: link positions are written out in
//! world coordinates, Jacobians come from finite differences, and the force and
//! momentum balances are assembled directly in the world frame before being
//! rotated back into the body frame.

use std::f64::consts::PI;

/// A value produced by an oracle, with the tolerance the kernel is held to.
#[derive(Debug, Clone)]
pub struct OracleResult<V> {
    pub quantity: &'static str,
    pub value: V,
    pub tolerance: f64,
    pub provenance: &'static str,
}

/// Generalized coordinates `(x, y, theta, phi1, phi2)`.
pub type Coords = [f64; 5];

/// World pose (centre x, centre y, heading) of each link.
pub fn link_world_poses(lengths: [f64; 3], q: &Coords) -> [[f64; 3]; 3] {
    let [l0, l1, l2] = lengths;
    let [x, y, th, p1, p2] = *q;
    let front = [x + 0.5 * l0 * th.cos(), y + 0.5 * l0 * th.sin()];
    let back = [x - 0.5 * l0 * th.cos(), y - 0.5 * l0 * th.sin()];
    let h1 = th + p1;
    let h2 = th - p2;
    [
        [x, y, th],
        [front[0] + 0.5 * l1 * h1.cos(), front[1] + 0.5 * l1 * h1.sin(), h1],
        [back[0] - 0.5 * l2 * h2.cos(), back[1] - 0.5 * l2 * h2.sin(), h2],
    ]
}

/// World-frame link Jacobians d(pose_i)/dq by central differences.
pub fn world_jacobians(lengths: [f64; 3], q: &Coords) -> [[[f64; 5]; 3]; 3] {
    let h = 1e-6;
    let mut jac = [[[0.0; 5]; 3]; 3];
    for k in 0..5 {
        let mut qp = *q;
        let mut qm = *q;
        qp[k] += h;
        qm[k] -= h;
        let pp = link_world_poses(lengths, &qp);
        let pm = link_world_poses(lengths, &qm);
        for i in 0..3 {
            for r in 0..3 {
                jac[i][r][k] = (pp[i][r] - pm[i][r]) / (2.0 * h);
            }
        }
    }
    jac
}

/// Body-frame link Jacobians (the kernel's convention: link velocities
/// expressed in the middle-link frame, columns for body twist and joint rates).
pub fn body_jacobians(lengths: [f64; 3], phi: [f64; 2]) -> [[[f64; 5]; 3]; 3] {
    // At theta = 0 and the origin, world and body frames coincide, and a body
    // twist (vx, vy, w) equals the world rates (xdot, ydot, thetadot).
    world_jacobians(lengths, &[0.0, 0.0, 0.0, phi[0], phi[1]])
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())
            .unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in 0..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    (0..n).map(|i| b[i] / a[i][i]).collect()
}

/// Resolve a world-frame generalized matrix `K` (5x5, symmetric) into the
/// body-frame connection: solve `K_bb qdot_b + K_bs phidot = 0` and rotate.
fn connection_from_world_matrix(k: &[[f64; 5]; 5], theta: f64) -> [[f64; 2]; 3] {
    let mut out = [[0.0; 2]; 3];
    for j in 0..2 {
        let a = (0..3).map(|r| (0..3).map(|c| k[r][c]).collect()).collect();
        let b = (0..3).map(|r| -k[r][3 + j]).collect();
        let w = solve(a, b);
        let (s, c) = theta.sin_cos();
        out[0][j] = c * w[0] + s * w[1];
        out[1][j] = -s * w[0] + c * w[1];
        out[2][j] = w[2];
    }
    out
}

fn rotated_diag(heading: f64, d: [f64; 3]) -> [[f64; 3]; 3] {
    let (s, c) = heading.sin_cos();
    [
        [c * c * d[0] + s * s * d[1], c * s * (d[0] - d[1]), 0.0],
        [c * s * (d[0] - d[1]), s * s * d[0] + c * c * d[1], 0.0],
        [0.0, 0.0, d[2]],
    ]
}

/// Purcell connection from a world-frame resistive force balance.
///
/// `theta` places the swimmer at an arbitrary heading, which exercises the
/// world-to-body rotation as well.
pub fn oracle_purcell_connection(
    lengths: [f64; 3],
    ct: f64,
    cn: f64,
    phi: [f64; 2],
    theta: f64,
) -> OracleResult<[[f64; 2]; 3]> {
    let q = [0.3, -0.7, theta, phi[0], phi[1]];
    let poses = link_world_poses(lengths, &q);
    let jac = world_jacobians(lengths, &q);
    let mut k = [[0.0; 5]; 5];
    for i in 0..3 {
        let l = lengths[i];
        let d = rotated_diag(poses[i][2], [ct * l, cn * l, cn * l.powi(3) / 12.0]);
        // generalized force = -J^T D J qdot
        for a in 0..5 {
            for b in 0..5 {
                let mut acc = 0.0;
                for r in 0..3 {
                    for s in 0..3 {
                        acc += jac[i][r][a] * d[r][s] * jac[i][s][b];
                    }
                }
                k[a][b] += acc;
            }
        }
    }
    OracleResult {
        quantity: "purcell local connection",
        value: connection_from_world_matrix(&k, theta),
        tolerance: 1e-6,
        provenance: "world-frame force balance with finite-difference Jacobians",
    }
}

/// Kinetic energy of the perfect-fluid swimmer for generalized velocity `qdot`.
pub fn perfect_fluid_kinetic_energy(
    semi_major: [f64; 3],
    semi_minor: [f64; 3],
    rho: f64,
    q: &Coords,
    qdot: &Coords,
) -> f64 {
    let lengths = semi_major.map(|a| 2.0 * a);
    let poses = link_world_poses(lengths, q);
    let jac = world_jacobians(lengths, q);
    let mut t = 0.0;
    for i in 0..3 {
        let v: Vec<f64> = (0..3).map(|r| (0..5).map(|c| jac[i][r][c] * qdot[c]).sum()).collect();
        // velocity in the link's own frame
        let (s, c) = poses[i][2].sin_cos();
        let along = c * v[0] + s * v[1];
        let across = -s * v[0] + c * v[1];
        let (a, b) = (semi_major[i], semi_minor[i]);
        let mass = rho * PI * a * b;
        let inertia = mass * (a * a + b * b) / 4.0;
        let m_along = mass + PI * rho * b * b;
        let m_across = mass + PI * rho * a * a;
        let i_rot = inertia + PI * rho * (a * a - b * b).powi(2) / 8.0;
        t += 0.5 * (m_along * along * along + m_across * across * across + i_rot * v[2] * v[2]);
    }
    t
}

/// Perfect-fluid connection from the mass matrix recovered by polarizing the
/// kinetic energy, followed by momentum conservation from rest.
pub fn oracle_perfect_fluid_connection(
    semi_major: [f64; 3],
    semi_minor: [f64; 3],
    rho: f64,
    phi: [f64; 2],
    theta: f64,
) -> OracleResult<[[f64; 2]; 3]> {
    let q = [-0.2, 0.4, theta, phi[0], phi[1]];
    let energy = |v: &Coords| perfect_fluid_kinetic_energy(semi_major, semi_minor, rho, &q, v);
    let unit = |k: usize| {
        let mut e = [0.0; 5];
        e[k] = 1.0;
        e
    };
    let mut m = [[0.0; 5]; 5];
    for a in 0..5 {
        for b in 0..5 {
            let mut e = unit(a);
            e[b] += 1.0;
            // T is quadratic: M_ab = T(e_a + e_b) - T(e_a) - T(e_b) (a != b), 2 T(e_a) on the diagonal
            m[a][b] = if a == b {
                2.0 * energy(&unit(a))
            } else {
                energy(&e) - energy(&unit(a)) - energy(&unit(b))
            };
        }
    }
    OracleResult {
        quantity: "perfect fluid local connection",
        value: connection_from_world_matrix(&m, theta),
        tolerance: 1e-6,
        provenance: "polarized kinetic energy with finite-difference Jacobians",
    }
}

/// Lie bracket of the two connection columns as the commutator of their
/// homogeneous 3x3 twist matrices.
pub fn oracle_commutator(a: &[[f64; 2]; 3]) -> OracleResult<[f64; 3]> {
    let hat = |j: usize| {
        [
            [0.0, -a[2][j], a[0][j]],
            [a[2][j], 0.0, a[1][j]],
            [0.0, 0.0, 0.0],
        ]
    };
    let (x, y) = (hat(0), hat(1));
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                c[i][j] += x[i][k] * y[k][j] - y[i][k] * x[k][j];
            }
        }
    }
    OracleResult {
        quantity: "se(2) commutator",
        value: [c[0][2], c[1][2], c[1][0]],
        tolerance: 1e-12,
        provenance: "dense matrix commutator",
    }
}

/// `-dH/dz` by central differences of a scalar Hamiltonian over the state.
pub fn oracle_costate_gradient<const N: usize>(
    hamiltonian: impl Fn(&[f64; N]) -> f64,
    z: &[f64; N],
    step: f64,
) -> OracleResult<[f64; N]> {
    let mut out = [0.0; N];
    for k in 0..N {
        let mut zp = *z;
        let mut zm = *z;
        zp[k] += step;
        zm[k] -= step;
        out[k] = -(hamiltonian(&zp) - hamiltonian(&zm)) / (2.0 * step);
    }
    OracleResult {
        quantity: "costate rate -dH/dz",
        value: out,
        tolerance: 1e-5,
        provenance: "central differences of the Hamiltonian",
    }
}

/// Net displacement of a closed shape-space curve by fixed-step RK4 on the
/// world-frame reconstruction equation. `connection` returns the body-frame
/// connection rows; `curve` maps s in [0, 1] to (phi, dphi/ds).
pub fn oracle_line_integral(
    connection: impl Fn([f64; 2]) -> [[f64; 2]; 3],
    curve: impl Fn(f64) -> ([f64; 2], [f64; 2]),
    steps: usize,
) -> [f64; 3] {
    let rate = |s: f64, g: [f64; 3]| {
        let (p, dp) = curve(s);
        let a = connection(p);
        let v: Vec<f64> = (0..3).map(|r| a[r][0] * dp[0] + a[r][1] * dp[1]).collect();
        let (sn, cs) = g[2].sin_cos();
        [cs * v[0] - sn * v[1], sn * v[0] + cs * v[1], v[2]]
    };
    let h = 1.0 / steps as f64;
    let mut g = [0.0; 3];
    for i in 0..steps {
        let s = i as f64 * h;
        let add = |g: [f64; 3], k: [f64; 3], f: f64| [g[0] + f * k[0], g[1] + f * k[1], g[2] + f * k[2]];
        let k1 = rate(s, g);
        let k2 = rate(s + 0.5 * h, add(g, k1, 0.5 * h));
        let k3 = rate(s + 0.5 * h, add(g, k2, 0.5 * h));
        let k4 = rate(s + h, add(g, k3, h));
        for r in 0..3 {
            g[r] += h / 6.0 * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r]);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_of_parallel_columns_vanishes() {
        let a = [[1.0, 2.0], [0.5, 1.0], [-0.3, -0.6]];
        assert!(oracle_commutator(&a).value.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn isotropic_drag_has_zero_rotation_for_straight_swimmer() {
        let r = oracle_purcell_connection([1.0; 3], 1.0, 2.0, [0.0, 0.0], 0.0);
        // straight swimmer: symmetric flapping of both ends gives no translation along x
        assert!(r.value[0][0].abs() < 1e-8 && r.value[0][1].abs() < 1e-8);
    }
}
