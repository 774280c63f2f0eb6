//! Serial-chain kinematics shared by both swimmer models.
//!
//! Link 0 is the middle link, its centre at the body origin and aligned with
//! the body x axis. Link 1 hangs off the +x end with relative heading `phi1`;
//! link 2 hangs off the -x end with relative heading `-phi2`. With this
//! convention the diagonal `phi1 == phi2` holds the mirror-symmetric "C"
//! shapes and the anti-diagonal `phi1 == -phi2` the point-symmetric "S" shapes.
//!
//! All link velocities are expressed in the middle-link body frame.

use crate::scalar::{cst, Scalar};

/// Centre position and heading of one link relative to the middle link.
#[derive(Debug, Clone, Copy)]
pub struct LinkPlacement<T> {
    pub x: T,
    pub y: T,
    pub heading: T,
    /// d(x, y, heading) / d(phi1, phi2)
    pub dshape: [[T; 2]; 3],
}

/// A 3x5 link Jacobian: rows (vx, vy, omega), columns (vx_b, vy_b, omega_b, dphi1, dphi2).
pub type LinkJacobian<T> = [[T; 5]; 3];

pub fn link_placements<T: Scalar>(lengths: [f64; 3], phi1: T, phi2: T) -> [LinkPlacement<T>; 3] {
    let [l0, l1, l2] = lengths;
    let z = T::zero();
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    let h1 = 0.5 * l1;
    let h2 = 0.5 * l2;
    [
        LinkPlacement {
            x: z,
            y: z,
            heading: z,
            dshape: [[z; 2]; 3],
        },
        LinkPlacement {
            x: c1 * h1 + 0.5 * l0,
            y: s1 * h1,
            heading: phi1,
            dshape: [[-s1 * h1, z], [c1 * h1, z], [T::one(), z]],
        },
        LinkPlacement {
            x: -(c2 * h2) - 0.5 * l0,
            y: s2 * h2,
            heading: -phi2,
            dshape: [[z, s2 * h2], [z, c2 * h2], [z, cst(-1.0)]],
        },
    ]
}

pub fn link_jacobian<T: Scalar>(p: &LinkPlacement<T>) -> LinkJacobian<T> {
    let z = T::zero();
    let o = T::one();
    [
        [o, z, -p.y, p.dshape[0][0], p.dshape[0][1]],
        [z, o, p.x, p.dshape[1][0], p.dshape[1][1]],
        [z, z, o, p.dshape[2][0], p.dshape[2][1]],
    ]
}

/// The three link Jacobians `J_i` with `v_i = J_i [body twist; dphi]`.
pub fn link_jacobians<T: Scalar>(lengths: [f64; 3], phi1: T, phi2: T) -> [LinkJacobian<T>; 3] {
    let p = link_placements(lengths, phi1, phi2);
    [link_jacobian(&p[0]), link_jacobian(&p[1]), link_jacobian(&p[2])]
}

/// `sum_i J_i^T K_i J_i` where `K_i` is a diagonal link-frame matrix rotated
/// into the body frame by the link heading.
pub(crate) fn assemble<T: Scalar>(
    lengths: [f64; 3],
    phi1: T,
    phi2: T,
    link_diag: &[[f64; 3]; 3],
) -> [[T; 5]; 5] {
    let placements = link_placements(lengths, phi1, phi2);
    let mut out = [[T::zero(); 5]; 5];
    for (p, d) in placements.iter().zip(link_diag) {
        let j = link_jacobian(p);
        let (s, c) = p.heading.sin_cos();
        // K = R diag(d) R^T for the translational block, d[2] for rotation.
        let k00 = c * c * d[0] + s * s * d[1];
        let k01 = c * s * (d[0] - d[1]);
        let k11 = s * s * d[0] + c * c * d[1];
        let k22: T = cst(d[2]);
        let k = [[k00, k01, T::zero()], [k01, k11, T::zero()], [T::zero(), T::zero(), k22]];
        let mut kj = [[T::zero(); 5]; 3];
        for r in 0..3 {
            for col in 0..5 {
                kj[r][col] = k[r][0] * j[0][col] + k[r][1] * j[1][col] + k[r][2] * j[2][col];
            }
        }
        for a in 0..5 {
            for b in 0..5 {
                out[a][b] += j[0][a] * kj[0][b] + j[1][a] * kj[1][b] + j[2][a] * kj[2][b];
            }
        }
    }
    out
}
