//! Displacement-maximizing gaits for planar three-link kinematic swimmers.

pub mod config;
pub mod connection;
pub mod error;
pub mod geometry;
pub mod models;
pub mod ode;
pub mod pmp;
pub mod roots;
mod scalar;
pub mod se2;
pub mod simulate;
pub mod types;

pub use error::{GaitError, Result};
pub use scalar::Scalar;
pub use types::{BodyPose, BodyVelocity, LocalConnection, ShapePoint};
