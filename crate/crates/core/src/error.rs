use thiserror::Error;

/// Errors raised by the swimmer models, integrators and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaitError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("resistance matrix is numerically singular (condition estimate {0:.3e})")]
    SingularResistance(f64),
    #[error("body inertia block is numerically singular (condition estimate {0:.3e})")]
    SingularInertia(f64),
    #[error("invalid gait: {0}")]
    InvalidGait(String),
    #[error("integration failed at s = {at:.6}: {reason}")]
    IntegrationFailure { at: f64, reason: String },
    #[error("region polygon is not simple")]
    NonSimpleRegion,
    #[error("no zero contour: field does not change sign")]
    EmptyContour,
    #[error("loop carries a junction near ({0:.3}, {1:.3})")]
    JunctionBearing(f64, f64),
    #[error("singular arc broke down at phi = ({phi1:.4}, {phi2:.4}), t = {t:.4}")]
    SingularArcBreakdown { phi1: f64, phi2: f64, t: f64 },
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("shooting residual does not change sign on [{lo:.4}, {hi:.4}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("singular arc never reached the bound phi2 = {0}")]
    BoundNeverReached(f64),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = GaitError> = std::result::Result<T, E>;
