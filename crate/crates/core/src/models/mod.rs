//! Three-link swimmer models and their local connections.

mod kinematics;
mod perfect_fluid;
mod purcell;

pub use kinematics::{link_jacobians, link_placements, LinkJacobian, LinkPlacement};
pub use perfect_fluid::{PerfectFluidParams, RotationalAddedMass};
pub use purcell::PurcellParams;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::Scalar;
use crate::types::{LocalConnection, ShapePoint};

/// Anything that maps joint velocities to body velocities.
///
/// `connection_at` is generic over the scalar so that callers can push dual
/// numbers through it and read off exact shape derivatives.
pub trait ConnectionModel: Sync {
    fn connection_at<T: Scalar>(&self, phi1: T, phi2: T) -> Result<[[T; 2]; 3]>;

    fn connection(&self, phi: ShapePoint) -> Result<LocalConnection> {
        self.connection_at(phi.phi1, phi.phi2).map(LocalConnection)
    }
}

impl<M: ConnectionModel + ?Sized> ConnectionModel for &M {
    fn connection_at<T: Scalar>(&self, phi1: T, phi2: T) -> Result<[[T; 2]; 3]> {
        (**self).connection_at(phi1, phi2)
    }
}

/// One of the two physical swimmer models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Swimmer {
    Purcell(PurcellParams),
    PerfectFluid(PerfectFluidParams),
}

impl Swimmer {
    pub fn purcell_default() -> Self {
        Swimmer::Purcell(PurcellParams::default())
    }

    pub fn perfect_fluid(eta: f64, alpha: f64) -> Self {
        Swimmer::PerfectFluid(PerfectFluidParams::from_ratios(eta, alpha, 1.0))
    }

    pub fn link_lengths(&self) -> [f64; 3] {
        match self {
            Swimmer::Purcell(p) => p.lengths(),
            Swimmer::PerfectFluid(p) => p.lengths(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Swimmer::Purcell(p) => p.validate(true),
            Swimmer::PerfectFluid(p) => p.validate(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Swimmer::Purcell(_) => "purcell",
            Swimmer::PerfectFluid(_) => "perfect_fluid",
        }
    }
}

impl ConnectionModel for Swimmer {
    fn connection_at<T: Scalar>(&self, phi1: T, phi2: T) -> Result<[[T; 2]; 3]> {
        match self {
            Swimmer::Purcell(p) => p.connection(phi1, phi2),
            Swimmer::PerfectFluid(p) => p.connection(phi1, phi2),
        }
    }
}

pub fn purcell_connection(params: &PurcellParams, phi: ShapePoint) -> Result<LocalConnection> {
    params.connection(phi.phi1, phi.phi2).map(LocalConnection)
}

pub fn perfect_fluid_connection(
    params: &PerfectFluidParams,
    phi: ShapePoint,
) -> Result<LocalConnection> {
    params.connection(phi.phi1, phi.phi2).map(LocalConnection)
}
