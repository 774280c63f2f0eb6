//! Planar rigid-body group helpers.
//!
//! Poses are `(x, y, theta)` and act as `p -> R(theta) p + (x, y)`. Twists are
//! body-frame velocities `(vx, vy, omega)`.

use crate::types::{BodyPose, BodyVelocity};

/// Group product `a * b`: apply `b` expressed in the frame of `a`.
pub fn compose(a: BodyPose, b: BodyPose) -> BodyPose {
    let (s, c) = a.theta.sin_cos();
    BodyPose::new(
        a.x + c * b.x - s * b.y,
        a.y + s * b.x + c * b.y,
        a.theta + b.theta,
    )
}

pub fn inverse(a: BodyPose) -> BodyPose {
    let (s, c) = a.theta.sin_cos();
    BodyPose::new(-(c * a.x + s * a.y), s * a.x - c * a.y, -a.theta)
}

/// Distance between two poses, with the heading difference wrapped to (-pi, pi].
pub fn pose_error(a: BodyPose, b: BodyPose) -> f64 {
    let dth = wrap_angle(a.theta - b.theta);
    (a.x - b.x).abs().max((a.y - b.y).abs()).max(dth.abs())
}

pub fn wrap_angle(t: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut w = t.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

/// Flow for unit time along a constant body twist.
pub fn exp(xi: BodyVelocity) -> BodyPose {
    let w = xi.omega;
    if w.abs() < 1e-12 {
        return BodyPose::new(xi.vx, xi.vy, w);
    }
    let (s, c) = w.sin_cos();
    BodyPose::new(
        (s * xi.vx - (1.0 - c) * xi.vy) / w,
        ((1.0 - c) * xi.vx + s * xi.vy) / w,
        w,
    )
}

/// Rotate a body twist into the world frame at heading `theta`.
pub fn to_world(theta: f64, xi: BodyVelocity) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    [c * xi.vx - s * xi.vy, s * xi.vx + c * xi.vy, xi.omega]
}

/// Adjoint action `Ad_g xi` of a pose on a twist.
pub fn adjoint(g: BodyPose, xi: BodyVelocity) -> BodyVelocity {
    let (s, c) = g.theta.sin_cos();
    BodyVelocity::new(
        c * xi.vx - s * xi.vy + xi.omega * g.y,
        s * xi.vx + c * xi.vy - xi.omega * g.x,
        xi.omega,
    )
}

/// Lie bracket of two twists, equal to the matrix commutator of their
/// homogeneous 3x3 representations. The rotational part is always zero.
pub fn bracket(a: BodyVelocity, b: BodyVelocity) -> BodyVelocity {
    BodyVelocity::new(
        a.vy * b.omega - b.vy * a.omega,
        b.vx * a.omega - a.vx * b.omega,
        0.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_composes_to_identity() {
        let g = BodyPose::new(0.3, -1.2, 2.1);
        let e = compose(g, inverse(g));
        assert!(pose_error(e, BodyPose::IDENTITY) < 1e-14);
        let e = compose(inverse(g), g);
        assert!(pose_error(e, BodyPose::IDENTITY) < 1e-14);
    }

    #[test]
    fn exp_matches_small_step_flow() {
        let xi = BodyVelocity::new(0.4, -0.1, 1.3);
        let n = 20000;
        let step = BodyVelocity::new(xi.vx / n as f64, xi.vy / n as f64, xi.omega / n as f64);
        let mut g = BodyPose::IDENTITY;
        let inc = exp(step);
        for _ in 0..n {
            g = compose(g, inc);
        }
        assert!(pose_error(g, exp(xi)) < 1e-10);
        // straight-line case
        let p = exp(BodyVelocity::new(1.0, 2.0, 0.0));
        assert_eq!(p, BodyPose::new(1.0, 2.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates_exponential() {
        let g = BodyPose::new(0.7, 0.2, -0.9);
        let xi = BodyVelocity::new(0.3, 0.5, 0.8);
        let lhs = compose(compose(g, exp(xi)), inverse(g));
        let rhs = exp(adjoint(g, xi));
        assert!(pose_error(lhs, rhs) < 1e-13);
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }
}
