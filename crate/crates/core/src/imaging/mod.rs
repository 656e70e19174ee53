//! Conversions between team configurations and intensity images.
//!
//! Agents are rendered as Gaussian blobs on a fixed-scale grid. Going the
//! other way, the blobs of a planner's output image are counted, covered by
//! Lloyd's algorithm, and the resulting relays pruned to a minimal
//! connecting set.

mod extract;
mod grid;
mod lloyd;
mod peaks;
mod prune;
mod render;

pub use extract::{extract_config, Extraction};
pub use grid::{GridSpec, IntensityImage};
pub use lloyd::{lloyd_extract, LLOYD_MAX_ITERATIONS, LLOYD_TOLERANCE_PX};
pub use peaks::{components, count_peaks, Component, FLOOR_INTENSITY, MIN_COMPONENT_AREA,
    THRESHOLD_FRACTION};
pub use prune::prune_redundant;
pub use render::{render, KERNEL_RADIUS_PX, KERNEL_SIGMA_PX, RENDER_MARGIN_PX};

use thiserror::Error;

use crate::channel::ChannelError;
use crate::geometry::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImagingError {
    #[error("agent {index} at ({}, {}) lies outside the renderable area", point.x, point.y)]
    OutOfBounds { index: usize, point: Point },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("team is disconnected at the given power")]
    Disconnected,
    #[error("png: {0}")]
    Png(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}
