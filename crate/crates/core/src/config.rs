//! Model configuration files.
//!
//! A config is a TOML document. `model` selects the swimmer and the remaining
//! top-level keys set its parameters; anything left out takes the default.
//!
//! ```toml
//! model = "purcell"
//! l0 = 0.3333333333333333
//! l1 = 0.3333333333333333
//! l2 = 0.3333333333333333
//! ct = 1.0
//! cn = 2.0
//! frame = "optimized"
//! ```
//!
//! A perfect-fluid swimmer is given either by ratios (`eta`, `alpha`, `rho`)
//! or by raw semi-axes (`a = [..]`, `b = [..]`), plus the optional
//! `rotational_added_mass = "squared" | "linear"`. `frame` is `"middle-link"`,
//! `"optimized"` or a table `{ position = [..], orientation = [..] }`.

use std::path::Path;

use serde::Deserialize;

use crate::connection::{optimize_frame, BodyFrameSpec, FrameOptimization, Window};
use crate::error::{GaitError, Result};
use crate::models::{PerfectFluidParams, PurcellParams, RotationalAddedMass, Swimmer};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: String,
    l0: Option<f64>,
    l1: Option<f64>,
    l2: Option<f64>,
    ct: Option<f64>,
    cn: Option<f64>,
    eta: Option<f64>,
    alpha: Option<f64>,
    rho: Option<f64>,
    a: Option<[f64; 3]>,
    b: Option<[f64; 3]>,
    rotational_added_mass: Option<RotationalAddedMass>,
    frame: Option<RawFrame>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawFrame {
    Name(String),
    Weights { position: [f64; 3], orientation: [f64; 3] },
}

/// How the body frame is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameChoice {
    MiddleLink,
    /// Minimum-perturbation frame, optimized for the swimmer when resolved.
    Optimized,
    Fixed(BodyFrameSpec),
}

impl std::str::FromStr for FrameChoice {
    type Err = GaitError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "middle-link" => Ok(FrameChoice::MiddleLink),
            "optimized" => Ok(FrameChoice::Optimized),
            _ => Err(GaitError::Config(format!("unknown frame {s:?} (expected middle-link or optimized)"))),
        }
    }
}

/// Window and grid the minimum-perturbation frame is fitted on.
pub const FRAME_WINDOW: f64 = 3.0;
pub const FRAME_GRID: usize = 21;

impl FrameChoice {
    pub fn resolve(&self, swimmer: &Swimmer) -> Result<BodyFrameSpec> {
        match self {
            FrameChoice::MiddleLink => Ok(BodyFrameSpec::MiddleLink),
            FrameChoice::Fixed(f) => Ok(*f),
            FrameChoice::Optimized => Ok(optimized_frame(swimmer)?.frame),
        }
    }
}

pub fn optimized_frame(swimmer: &Swimmer) -> Result<FrameOptimization> {
    optimize_frame(swimmer, Window::square(FRAME_WINDOW), FRAME_GRID, BodyFrameSpec::MiddleLink)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub swimmer: Swimmer,
    /// `None` leaves the choice to the command.
    pub frame: Option<FrameChoice>,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { swimmer: Swimmer::purcell_default(), frame: None, seed: 0 }
    }
}

impl ModelConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| GaitError::Config(e.message().to_string()))?;
        let reject = |keys: &[(&str, bool)], model: &str| -> Result<()> {
            match keys.iter().find(|(_, set)| *set) {
                Some((k, _)) => Err(GaitError::Config(format!("key {k:?} does not apply to model {model:?}"))),
                None => Ok(()),
            }
        };
        let swimmer = match raw.model.as_str() {
            "purcell" => {
                reject(
                    &[
                        ("eta", raw.eta.is_some()),
                        ("alpha", raw.alpha.is_some()),
                        ("rho", raw.rho.is_some()),
                        ("a", raw.a.is_some()),
                        ("b", raw.b.is_some()),
                        ("rotational_added_mass", raw.rotational_added_mass.is_some()),
                    ],
                    "purcell",
                )?;
                let d = PurcellParams::default();
                Swimmer::Purcell(PurcellParams {
                    l0: raw.l0.unwrap_or(d.l0),
                    l1: raw.l1.unwrap_or(d.l1),
                    l2: raw.l2.unwrap_or(d.l2),
                    ct: raw.ct.unwrap_or(d.ct),
                    cn: raw.cn.unwrap_or(d.cn),
                })
            }
            "perfect_fluid" => {
                reject(
                    &[
                        ("l0", raw.l0.is_some()),
                        ("l1", raw.l1.is_some()),
                        ("l2", raw.l2.is_some()),
                        ("ct", raw.ct.is_some()),
                        ("cn", raw.cn.is_some()),
                    ],
                    "perfect_fluid",
                )?;
                let rho = raw.rho.unwrap_or(1.0);
                let mut p = match (raw.a, raw.b) {
                    (Some(a), Some(b)) => {
                        if raw.eta.is_some() || raw.alpha.is_some() {
                            return Err(GaitError::Config("give either eta/alpha or a/b, not both".into()));
                        }
                        PerfectFluidParams { a, b, rho, rotational_added_mass: RotationalAddedMass::default() }
                    }
                    (None, None) => PerfectFluidParams::from_ratios(raw.eta.unwrap_or(1.0 / 3.0), raw.alpha.unwrap_or(0.2), rho),
                    _ => return Err(GaitError::Config("a and b must be given together".into())),
                };
                if let Some(r) = raw.rotational_added_mass {
                    p.rotational_added_mass = r;
                }
                Swimmer::PerfectFluid(p)
            }
            other => return Err(GaitError::Config(format!("unknown model {other:?} (expected purcell or perfect_fluid)"))),
        };
        swimmer.validate().map_err(|e| GaitError::Config(e.to_string()))?;
        let frame = match raw.frame {
            None => None,
            Some(RawFrame::Name(s)) => Some(s.parse()?),
            Some(RawFrame::Weights { position, orientation }) => Some(FrameChoice::Fixed(
                BodyFrameSpec::weighted(position, orientation).map_err(|e| GaitError::Config(e.to_string()))?,
            )),
        };
        Ok(ModelConfig { swimmer, frame, seed: raw.seed.unwrap_or(0) })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| GaitError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
