//! Height functions over shape space and their zero-level curves.
//!
//! The x-row of the total curvature, plotted over the joint angles, is
//! positive where a small ccw loop pushes the swimmer forward. Its zero-level
//! loops are candidate displacement-maximizing gaits; saddles sitting on the
//! zero level (junctions) mark where no smooth optimal loop exists.

mod contour;
mod field;
mod gait;
mod junction;

pub use contour::{extract_zero_contours, extract_zero_contours_with, Contour, ContourKind, ContourSet};
pub use field::{height_at, sample_height_field, Component, HeightField, MIN_GRID};
pub use gait::{contour_as_gait, hausdorff, refine_contour, ContourGait, ContourGaitOptions};
pub use junction::{detect_junctions, Junction, JunctionOptions};

#[cfg(test)]
mod tests;
